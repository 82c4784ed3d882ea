"""Exact Taylor recurrences for rational disk functions and circle quadrature.

Everything the rank criterion consumes is a finite batch of Taylor
coefficients, so coefficient computation is done by exact linear recurrence
(float rounding only, no truncation error).  Quadrature on the unit circle is
the uniform-node average, which is spectrally accurate for periodic smooth
integrands; callers that need certified digits double the grid until two
successive values agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .tolerances import DEFAULT, Tolerances


class PoleMarginError(ValueError):
    """A denominator parameter sits too close to (or outside) the unit circle."""


class EvaluationError(RuntimeError):
    """An integrand produced a non-finite value at a grid node."""

    def __init__(self, node: complex, index: int):
        super().__init__(f"non-finite evaluation at node {index} ({node})")
        self.node = node
        self.index = index


class QuadratureConvergenceError(RuntimeError):
    """Grid doubling hit the size cap before successive means agreed."""


@dataclass(frozen=True)
class CoefficientSequence:
    """Finitely supported window of Taylor coefficients.

    Stores values for indices ``start, start+1, ...``; reads outside the
    stored window return exactly zero (in particular every negative index,
    matching the convention that coefficients of analytic functions vanish
    below zero).
    """

    start: int
    values: tuple[complex, ...]

    @property
    def stop(self) -> int:
        return self.start + len(self.values)

    def at(self, k: int) -> complex:
        if self.start <= k < self.stop:
            return self.values[k - self.start]
        return 0j

    def __getitem__(self, k: int) -> complex:
        return self.at(k)

    def to_array(self, up_to: int) -> np.ndarray:
        """Coefficients 0..up_to as a dense complex vector."""
        return np.array([self.at(k) for k in range(up_to + 1)], dtype=complex)

    @classmethod
    def from_values(cls, values: Sequence[complex], start: int = 0) -> "CoefficientSequence":
        return cls(start, tuple(complex(v) for v in values))


def convolve(s: CoefficientSequence, t: CoefficientSequence, up_to: int) -> CoefficientSequence:
    """Cauchy product of two coefficient sequences, truncated at ``up_to``.

    Independent of the recurrence in :func:`expand_rational`; the two paths
    are cross-checked against each other in the test suite.
    """
    if s.start < 0 or t.start < 0:
        raise ValueError("convolution requires start indices >= 0")
    out = []
    for k in range(up_to + 1):
        acc = 0j
        for i in range(s.start, min(k - t.start, s.stop - 1) + 1):
            acc += s.at(i) * t.at(k - i)
        out.append(acc)
    return CoefficientSequence(0, tuple(out))


def _expand_denominator(parameters: Sequence[complex]) -> list[complex]:
    """Expanded coefficients of prod_i (1 - conj(b_i) z), constant term first."""
    coeffs = [1 + 0j]
    for b in parameters:
        factor = -complex(b).conjugate()
        nxt = [0j] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] += c
            nxt[i + 1] += factor * c
        coeffs = nxt
    return coeffs


def polyval_ascending(coeffs: Sequence[complex], z):
    """Evaluate sum_k coeffs[k] z^k (Horner, ascending coefficient order)."""
    acc = np.zeros_like(np.asarray(z, dtype=complex)) if isinstance(z, np.ndarray) else 0j
    for c in reversed(tuple(coeffs)):
        acc = acc * z + c
    return acc


@dataclass(frozen=True)
class RationalDiskFunction:
    """p(z) / prod_i (1 - conj(b_i) z), analytic on a neighbourhood of the closed disk.

    Denominators are kept as parameter lists (one entry per factor, repeats
    encode multiplicity) rather than expanded coefficients, so the
    poles-outside-the-disk invariant is checkable by construction.
    """

    numerator: tuple[complex, ...]
    denominator_parameters: tuple[complex, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(complex(c) for c in self.numerator))
        object.__setattr__(
            self, "denominator_parameters", tuple(complex(b) for b in self.denominator_parameters)
        )
        self.require_pole_margin(DEFAULT.pole_margin)

    def require_pole_margin(self, margin: float) -> None:
        for b in self.denominator_parameters:
            if abs(b) >= 1.0 - margin:
                raise PoleMarginError(
                    f"denominator parameter {b} has modulus {abs(b):.17g} >= 1 - {margin:g}"
                )

    def __call__(self, z):
        num = polyval_ascending(self.numerator, z)
        den = np.ones_like(np.asarray(z, dtype=complex)) if isinstance(z, np.ndarray) else 1 + 0j
        for b in self.denominator_parameters:
            den = den * (1 - b.conjugate() * z)
        return num / den

    def taylor(self, up_to: int) -> CoefficientSequence:
        return expand_rational(self, up_to)

    def multiply(self, other: "RationalDiskFunction") -> "RationalDiskFunction":
        num = np.convolve(np.array(self.numerator), np.array(other.numerator))
        return RationalDiskFunction(
            tuple(num), self.denominator_parameters + other.denominator_parameters
        )

    def scale(self, s: complex) -> "RationalDiskFunction":
        return RationalDiskFunction(
            tuple(s * c for c in self.numerator), self.denominator_parameters
        )


def expand_rational(f: RationalDiskFunction, up_to: int) -> CoefficientSequence:
    """Taylor coefficients c_0..c_{up_to} of ``f`` at the origin.

    Writing the denominator as sum_n d_n z^n (d_0 = 1), the coefficients obey
    sum_n d_n c_{k-n} = p_k, which is solved forward exactly; the only error
    is float rounding, there is no truncation.
    """
    if up_to < 0:
        raise ValueError("up_to must be >= 0")
    f.require_pole_margin(DEFAULT.pole_margin)
    den = _expand_denominator(f.denominator_parameters)
    num = f.numerator
    coeffs: list[complex] = []
    for k in range(up_to + 1):
        acc = num[k] if k < len(num) else 0j
        for n in range(1, min(k, len(den) - 1) + 1):
            acc -= den[n] * coeffs[k - n]
        coeffs.append(acc)
    return CoefficientSequence(0, tuple(coeffs))


@dataclass(frozen=True)
class CircleGrid:
    """Uniform grid of n-th roots of unity with weights 1/n (n a power of two, >= 16)."""

    n: int

    def __post_init__(self):
        if self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 16, got {self.n}")

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.n) / self.n)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n, 1.0 / self.n)


def _grid_values(f: Callable[[np.ndarray], np.ndarray], grid: CircleGrid) -> np.ndarray:
    nodes = grid.nodes
    vals = np.asarray(f(nodes))
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = int(np.argmax(bad))
        raise EvaluationError(complex(nodes[idx]), idx)
    return vals


def circle_l1_norm(f: Callable[[np.ndarray], np.ndarray], grid: CircleGrid) -> float:
    """Uniform-grid average of |f| over the circle (one fixed grid, no refinement)."""
    return float(np.abs(_grid_values(f, grid)).mean())


@dataclass(frozen=True)
class LogMeanResult:
    value: float
    dropped_nodes: int

    @property
    def hit_zero(self) -> bool:
        return self.dropped_nodes > 0


def log_mean_modulus(f: Callable[[np.ndarray], np.ndarray], grid: CircleGrid) -> LogMeanResult:
    """Grid average of log|f|; exact zeros at nodes are dropped and flagged.

    Diagnostic only: the authoritative outerness check is root location, this
    average merely cross-checks it (outer functions satisfy
    mean log|f| = log|f(0)|).
    """
    mods = np.abs(_grid_values(f, grid))
    zero = mods == 0.0
    dropped = int(zero.sum())
    kept = mods[~zero]
    if kept.size == 0:
        return LogMeanResult(float("-inf"), dropped)
    return LogMeanResult(float(np.log(kept).mean()), dropped)


def converged_circle_mean(
    integrand: Callable[[np.ndarray], np.ndarray],
    tol: Tolerances = DEFAULT,
    target: float | None = None,
) -> tuple[float, int]:
    """Grid average of a real-valued integrand, doubling n until stable.

    Stops once successive values agree within ``target`` (default
    ``tol.quad``) scaled by max(1, |value|); raises
    :class:`QuadratureConvergenceError` if the cap ``tol.quad_max_n`` is hit
    while still moving.  Returns (value, final grid size).
    """
    goal = tol.quad if target is None else target
    n = tol.quad_start_n
    prev = float(np.real(_grid_values(integrand, CircleGrid(n))).mean())
    while n < tol.quad_max_n:
        n *= 2
        cur = float(np.real(_grid_values(integrand, CircleGrid(n))).mean())
        if abs(cur - prev) <= goal * max(1.0, abs(cur)):
            return cur, n
        prev = cur
    raise QuadratureConvergenceError(
        f"circle mean did not stabilise to {goal:g} by n = {tol.quad_max_n}"
    )
