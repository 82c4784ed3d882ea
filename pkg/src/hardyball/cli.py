"""Command-line surface: analyze, certify, sweep, gen.

Exit codes encode verdicts so shell pipelines can branch without parsing:
0 extreme / verified, 10 non-extreme, 11 borderline, 1 failed certificate,
2 input error, 3 generator gave up.  ``HARDY_TOL_RANK`` and
``HARDY_TOL_QUAD`` override the corresponding tolerances; explicit flags win
over the environment.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import certificates, documents, extremality, model
from .documents import DocumentError, canonical_json
from .extremality import BORDERLINE, EXTREME, NON_EXTREME
from .tolerances import DEFAULT, Tolerances

EXIT_EXTREME = 0
EXIT_CERTIFIED = 0
EXIT_FAILED_CERTIFICATE = 1
EXIT_INPUT_ERROR = 2
EXIT_GENERATOR_GAVE_UP = 3
EXIT_NON_EXTREME = 10
EXIT_BORDERLINE = 11

_STATUS_EXIT = {EXTREME: EXIT_EXTREME, NON_EXTREME: EXIT_NON_EXTREME, BORDERLINE: EXIT_BORDERLINE}


def _tolerances(options: dict | None = None, tol_rank: float | None = None,
                grid: int | None = None) -> Tolerances:
    tol = DEFAULT
    env = {}
    if "HARDY_TOL_RANK" in os.environ:
        env["rank"] = float(os.environ["HARDY_TOL_RANK"])
    if "HARDY_TOL_QUAD" in os.environ:
        env["quad"] = float(os.environ["HARDY_TOL_QUAD"])
    tol = tol.override(**env)
    if options:
        tol = tol.override(**options)
    return tol.override(rank=tol_rank, quad_start_n=grid)


def _read_document(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(path, f"cannot read file ({exc})") from exc
    return documents.load_json(text, source=path)


def _membership_dict(report: model.MembershipReport) -> dict:
    return {
        "passed": report.passed,
        "max_coefficient": float(report.max_coefficient),
        "holes": [
            {"k": k, "residual": float(r)} for k, r in zip(report.holes, report.residuals)
        ],
    }


def _witness_report_dict(report: certificates.WitnessReport) -> dict:
    def _f(x):
        return float(x) if x == x else None  # NaN -> null

    return {
        "verifies": report.verifies,
        "h_realness_residual": _f(report.h_realness_residual),
        "h_variation": _f(report.h_variation),
        "positivity_margin": _f(report.positivity_margin),
        "hole_residuals": [{"k": k, "residual": float(r)} for k, r in report.hole_residuals],
        "norm_f": _f(report.norm_f),
        "norm_plus": _f(report.norm_plus),
        "norm_minus": _f(report.norm_minus),
        "norm_plus_residual": _f(report.norm_plus_residual),
        "norm_minus_residual": _f(report.norm_minus_residual),
        "membership_plus": _membership_dict(report.membership_plus)
        if report.membership_plus else None,
        "membership_minus": _membership_dict(report.membership_minus)
        if report.membership_minus else None,
        "failures": list(report.failures),
    }


def _delta_dict(result: extremality.DeltaResult) -> dict:
    finite = result.delta == result.delta and abs(result.delta) != float("inf")
    return {
        "value": float(result.delta) if finite else "inf",
        "status": result.status,
    }


def _error_report(kind: str, message: str, extra: dict | None = None) -> dict:
    doc = {
        "format_version": documents.FORMAT_VERSION,
        "type": "error",
        "error": kind,
        "message": message,
    }
    if extra:
        doc.update(extra)
    return doc


def cmd_analyze(args) -> int:
    try:
        problem = documents.parse_problem(_read_document(args.problem), source=args.problem)
    except DocumentError as exc:
        print(canonical_json(_error_report("parse", str(exc))))
        return EXIT_INPUT_ERROR
    tol = _tolerances(problem.options, args.tol_rank, args.grid)

    f, space = problem.function.canonical(), problem.space
    membership = model.check_membership(f, space, tol)
    if not membership.passed:
        hole, residual = membership.worst()
        print(canonical_json(_error_report(
            "not_in_space",
            f"coefficient at hole {hole} has relative residual {residual:.3e}",
            {"membership": _membership_dict(membership)},
        )))
        return EXIT_INPUT_ERROR

    try:
        normalized, scale = model.normalize(f, tol)
        # the verdict is scale invariant; the exact backend must see the raw
        # coefficients (normalization rounds them off the rational member set)
        verdict = extremality.decide_extreme(
            f if args.exact else normalized, space, tol,
            backend="exact" if args.exact else "svd",
        )
    except (model.NotInSpaceError, ValueError) as exc:
        print(canonical_json(_error_report("input", str(exc))))
        return EXIT_INPUT_ERROR

    status = verdict.status
    witness = None
    witness_report = None
    witness_error = None
    if status == NON_EXTREME:
        try:
            witness = certificates.make_witness(normalized, space, verdict, tol)
            witness_report = certificates.verify_witness(normalized, space, witness, tol)
        except certificates.DegenerateKernelError as exc:
            # kernel collapsed onto the canonical vector: rank call was too close
            status = BORDERLINE
            witness_error = str(exc)

    delta = None
    if space.size == 1 and verdict.condition_a.m <= 1:
        delta = extremality.single_hole_delta(normalized, space.holes[0], tol)
    exposedness = certificates.check_exposed(normalized, space, verdict, tol)

    report = {
        "format_version": documents.FORMAT_VERSION,
        "type": "analysis_report",
        "normalized_scale": float(scale),
        "membership": _membership_dict(membership),
        "verdict": {
            "status": status,
            "rank": verdict.rank,
            "target_rank": verdict.target_rank,
            "condition_a": {
                "holds": verdict.condition_a.holds,
                "inner_degree": verdict.condition_a.m,
                "hole_count": verdict.condition_a.M,
            },
            "singular_values": [float(s) for s in verdict.singular_values],
            "kernel_dimension": verdict.kernel_dimension,
            "canonical_alignment": extremality.kernel_alignment(verdict, f.inner.zeros),
            "backend": verdict.backend,
        },
        "delta": _delta_dict(delta) if delta is not None else None,
        "exposedness": {
            "status": exposedness.status,
            "circle_roots": [[float(r.real), float(r.imag)] for r in exposedness.circle_roots],
        },
        "witness": documents.witness_to_dict(witness) if witness else None,
        "witness_report": _witness_report_dict(witness_report) if witness_report else None,
    }
    if witness_error:
        report["witness_error"] = witness_error
    print(canonical_json(report))

    if args.witness_out and witness is not None:
        Path(args.witness_out).write_text(canonical_json(documents.witness_to_dict(witness)) + "\n")
    return _STATUS_EXIT[status]


def cmd_certify(args) -> int:
    try:
        problem = documents.parse_problem(_read_document(args.problem), source=args.problem)
        witness = documents.parse_witness(_read_document(args.witness), source=args.witness)
    except DocumentError as exc:
        print(canonical_json(_error_report("parse", str(exc))))
        return EXIT_INPUT_ERROR
    tol = _tolerances(problem.options)
    f = problem.function.canonical()
    normalized, _ = model.normalize(f, tol)
    report = certificates.verify_witness(normalized, problem.space, witness, tol)
    doc = {"format_version": documents.FORMAT_VERSION, "type": "witness_report"}
    doc.update(_witness_report_dict(report))
    print(canonical_json(doc))
    return EXIT_CERTIFIED if report.verifies else EXIT_FAILED_CERTIFICATE


def _template_placeholders(data: dict) -> set[str]:
    names = set()
    for field in ("inner_zeros", "outer_numerator", "outer_denominator"):
        for entry in data.get(field, []) or []:
            if isinstance(entry, list):
                for slot in entry:
                    if isinstance(slot, str):
                        names.add(slot)
    return names


def _substitute(data: dict, assignment: dict[str, float]) -> dict:
    out = dict(data)
    for field in ("inner_zeros", "outer_numerator", "outer_denominator"):
        if field not in out or out[field] is None:
            continue
        rows = []
        for entry in out[field]:
            if isinstance(entry, list):
                rows.append([assignment.get(s, s) if isinstance(s, str) else s for s in entry])
            else:
                rows.append(entry)
        out[field] = rows
    return out


def _sweep_point(template: dict, names: tuple[str, ...], values: tuple[float, ...],
                 tol: Tolerances) -> list[str]:
    row = [documents.format_float(v) for v in values]
    try:
        problem = documents.parse_problem(
            _substitute(template, dict(zip(names, values))), source="<sweep>"
        )
        f, space = problem.function.canonical(), problem.space
        if not model.check_membership(f, space, tol).passed:
            return row + ["skip", "", "", ""]
        f, _ = model.normalize(f, tol)
        verdict = extremality.decide_extreme(f, space, tol)
        delta = ""
        if space.size == 1 and verdict.condition_a.m == 1:
            delta = documents.format_float(
                extremality.single_hole_delta(f, space.holes[0], tol).delta
            )
        sigmas = verdict.singular_values
        min_sigma = documents.format_float(float(sigmas.min())) if sigmas.size else ""
        return row + [verdict.status, str(verdict.rank), delta, min_sigma]
    except Exception as exc:
        cause = exc.__cause__ or exc
        return row + [f"error:{type(cause).__name__}", "", "", ""]


def _parse_range(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise DocumentError("--range", f"expected a:b:step, got {spec!r}")
    a, b, step = (float(p) for p in parts)
    if step <= 0 or b < a:
        raise DocumentError("--range", f"need a <= b and step > 0 in {spec!r}")
    count = int(np.floor((b - a) / step + 1e-9)) + 1
    return [a + i * step for i in range(count)]


def cmd_sweep(args) -> int:
    try:
        template = _read_document(args.template)
        names = tuple(args.param or [])
        ranges = [(_parse_range(r)) for r in (args.range or [])]
        if len(names) != len(ranges):
            raise DocumentError("--param/--range", "need one --range per --param")
        placeholders = _template_placeholders(template)
        if set(names) != placeholders:
            raise DocumentError(
                args.template,
                f"template sweeps {sorted(placeholders)} but parameters are {sorted(names)}",
            )
        first_point = documents.parse_problem(
            _substitute(template, {n: vals[0] for n, vals in zip(names, ranges)}),
            source=args.template,
        )
    except DocumentError as exc:
        print(canonical_json(_error_report("parse", str(exc))), file=sys.stderr)
        return EXIT_INPUT_ERROR
    tol = _tolerances(first_point.options)

    combos = list(itertools.product(*ranges))
    if args.jobs and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(
                _sweep_point,
                itertools.repeat(template), itertools.repeat(names), combos,
                itertools.repeat(tol),
            ))
    else:
        rows = [_sweep_point(template, names, combo, tol) for combo in combos]

    header = list(names) + ["status", "rank", "delta", "min_singular_value"]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return 0


def cmd_gen(args) -> int:
    try:
        data = _read_document(args.spec)
        if data.get("type") not in (None, "gen_spec"):
            raise DocumentError(args.spec, f"expected a gen_spec document, got {data.get('type')!r}")
        holes = data.get("holes", [])
        if not isinstance(holes, list) or any(
            isinstance(k, bool) or not isinstance(k, int) for k in holes
        ):
            raise DocumentError(args.spec + ".holes", "expected a list of integers")
        zeros = documents._as_complex_list(data.get("inner_zeros", []), args.spec + ".inner_zeros")
        den = documents._as_complex_list(
            data.get("outer_denominator", []), args.spec + ".outer_denominator"
        )
        degree = data.get("numerator_degree")
        if not isinstance(degree, int) or isinstance(degree, bool):
            raise DocumentError(args.spec + ".numerator_degree", "expected an integer")
        space = model.PuncturedSpace(tuple(holes))
    except (DocumentError, ValueError) as exc:
        print(canonical_json(_error_report("parse", str(exc))), file=sys.stderr)
        return EXIT_INPUT_ERROR
    tol = _tolerances()
    try:
        member = model.sample_member(space, zeros, den, degree, args.seed, tol)
    except model.MaxRetriesExceededError as exc:
        print(canonical_json(_error_report("generator", str(exc))), file=sys.stderr)
        return EXIT_GENERATOR_GAVE_UP
    print(canonical_json(documents.problem_to_dict(space, member)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardyball",
        description="Decide extremality of punctured-space functions, with checkable certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify a problem file and emit a full report")
    p.add_argument("problem")
    p.add_argument("--tol-rank", type=float, default=None)
    p.add_argument("--grid", type=int, default=None, help="starting quadrature grid size")
    p.add_argument("--exact", action="store_true", help="use the exact-arithmetic rank backend")
    p.add_argument("--witness-out", default=None, help="write the witness document here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("certify", help="re-verify a witness against a problem, trusting neither")
    p.add_argument("problem")
    p.add_argument("witness")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("sweep", help="evaluate a parametrized template over a grid, emit CSV")
    p.add_argument("template")
    p.add_argument("--param", action="append", help="swept parameter name (repeatable)")
    p.add_argument("--range", action="append", help="a:b:step for the matching --param")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="generate a random member problem document")
    p.add_argument("spec")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
