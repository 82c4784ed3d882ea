"""Problem, witness and report documents.

One self-describing JSON schema, versioned by ``format_version``.  Complex
numbers are [re, im] pairs.  Serialization is canonical: stable field order
(insertion order of the dicts built here) and floats rendered with 17
significant digits, so documents round-trip binary doubles bit-faithfully
and identical inputs produce byte-identical outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .certificates import PerturbationWitness
from .extremality import SymmetricPolynomial
from .model import BlaschkeProduct, FactoredFunction, OuterRational, PuncturedSpace

FORMAT_VERSION = 1

# problem "options" keys -> Tolerances field names
_OPTION_FIELDS = {
    "tol_rank": "rank",
    "tol_quad": "quad",
    "tol_root": "root",
    "tol_membership": "membership",
    "tol_delta": "delta",
}


class DocumentError(ValueError):
    """Schema violation with the JSON path where it happened."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def format_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite float {x} cannot be serialized")
    return format(float(x), ".17g")


def canonical_json(obj: Any, indent: int = 0) -> str:
    """Deterministic JSON text: insertion-ordered keys, 17-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [canonical_json(v, indent + 1) for v in obj]
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(items) + "]"
        return "[\n" + ",\n".join(inner + it for it in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = []
        for key, value in obj.items():
            if not isinstance(key, str):
                raise TypeError(f"document keys must be strings, got {key!r}")
            parts.append(f"{inner}{json.dumps(key)}: {canonical_json(value, indent + 1)}")
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__} canonically")


def _require(data: dict, key: str, path: str) -> Any:
    if key not in data:
        raise DocumentError(path, f"missing required field {key!r}")
    return data[key]


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(path, f"expected an integer, got {value!r}")
    return value


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(path, f"expected a number, got {value!r}")
    return float(value)


def _as_complex_pair(value: Any, path: str) -> complex:
    if not isinstance(value, list) or len(value) != 2:
        raise DocumentError(path, f"expected [re, im] pair, got {value!r}")
    return complex(_as_number(value[0], path + "[0]"), _as_number(value[1], path + "[1]"))


def _as_complex_list(value: Any, path: str) -> tuple[complex, ...]:
    if not isinstance(value, list):
        raise DocumentError(path, f"expected a list of [re, im] pairs, got {value!r}")
    return tuple(_as_complex_pair(v, f"{path}[{i}]") for i, v in enumerate(value))


def load_json(text: str, source: str = "<input>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(source, f"not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise DocumentError(source, "top level must be an object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise DocumentError(source, f"unsupported format_version {version!r}")
    return data


@dataclass(frozen=True)
class ProblemDocument:
    """Parsed problem: hole set, factored function, tolerance overrides."""

    space: PuncturedSpace
    function: FactoredFunction
    options: dict


def parse_problem(data: dict, source: str = "<problem>") -> ProblemDocument:
    if data.get("type") not in (None, "problem"):
        raise DocumentError(source, f"expected a problem document, got type {data.get('type')!r}")
    holes_raw = _require(data, "holes", source)
    if not isinstance(holes_raw, list):
        raise DocumentError(source + ".holes", "expected a list of integers")
    holes = tuple(_as_int(k, f"{source}.holes[{i}]") for i, k in enumerate(holes_raw))
    zeros = _as_complex_list(data.get("inner_zeros", []), source + ".inner_zeros")
    constant = _as_complex_pair(
        data.get("inner_constant", [1.0, 0.0]), source + ".inner_constant"
    )
    numerator = _as_complex_list(_require(data, "outer_numerator", source),
                                 source + ".outer_numerator")
    if not numerator:
        raise DocumentError(source + ".outer_numerator", "must not be empty")
    denominator = _as_complex_list(data.get("outer_denominator", []),
                                   source + ".outer_denominator")
    options_raw = data.get("options", {})
    if not isinstance(options_raw, dict):
        raise DocumentError(source + ".options", "expected an object")
    options = {}
    for key, value in options_raw.items():
        if key not in _OPTION_FIELDS:
            raise DocumentError(f"{source}.options.{key}", "unknown option")
        options[_OPTION_FIELDS[key]] = _as_number(value, f"{source}.options.{key}")
    try:
        space = PuncturedSpace(holes)
        inner = BlaschkeProduct(zeros, constant)
        outer = OuterRational(numerator, denominator)
    except ValueError as exc:
        raise DocumentError(source, str(exc)) from exc
    return ProblemDocument(space, FactoredFunction(inner, outer), options)


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def problem_to_dict(space: PuncturedSpace, f: FactoredFunction, options: dict | None = None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "type": "problem",
        "holes": list(space.holes),
        "inner_zeros": [_pair(a) for a in f.inner.zeros],
        "inner_constant": _pair(f.inner.constant),
        "outer_numerator": [_pair(c) for c in f.outer.numerator],
        "outer_denominator": [_pair(b) for b in f.outer.denominator_parameters],
    }
    if options:
        doc["options"] = dict(options)
    return doc


def witness_to_dict(w: PerturbationWitness) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "type": "witness",
        "provenance": w.provenance,
        "symmetric_order": w.polynomial.order,
        "coefficient_vector": [float(v) for v in w.polynomial.vector],
        "phi2_zeros": [_pair(a) for a in w.phi2_zeros],
        "epsilon": float(w.epsilon),
        "recenter_c": float(w.recenter),
    }


def parse_witness(data: dict, source: str = "<witness>") -> PerturbationWitness:
    if data.get("type") == "analysis_report":
        embedded = data.get("witness")
        if not isinstance(embedded, dict):
            raise DocumentError(source, "report carries no witness")
        data = dict(embedded, format_version=data["format_version"])
    if data.get("type") != "witness":
        raise DocumentError(source, f"expected a witness document, got type {data.get('type')!r}")
    order = _as_int(_require(data, "symmetric_order", source), source + ".symmetric_order")
    vector_raw = _require(data, "coefficient_vector", source)
    if not isinstance(vector_raw, list):
        raise DocumentError(source + ".coefficient_vector", "expected a list of numbers")
    vector = tuple(
        _as_number(v, f"{source}.coefficient_vector[{i}]") for i, v in enumerate(vector_raw)
    )
    phi2 = _as_complex_list(data.get("phi2_zeros", []), source + ".phi2_zeros")
    epsilon = _as_number(_require(data, "epsilon", source), source + ".epsilon")
    recenter = _as_number(_require(data, "recenter_c", source), source + ".recenter_c")
    provenance = _require(data, "provenance", source)
    if provenance not in ("kernel_path", "degree_overflow_path"):
        raise DocumentError(source + ".provenance", f"unknown provenance {provenance!r}")
    try:
        polynomial = SymmetricPolynomial(order, vector)
    except ValueError as exc:
        raise DocumentError(source + ".coefficient_vector", str(exc)) from exc
    if epsilon <= 0:
        raise DocumentError(source + ".epsilon", "must be positive")
    return PerturbationWitness(polynomial, phi2, epsilon, recenter, provenance)
