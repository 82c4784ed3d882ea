"""Factored functions on the disk and punctured-space membership.

A function is carried as an explicit canonical pair: a finite Blaschke
product (the inner factor) and a rational outer factor with poles outside the
closed disk.  Factorization of raw boundary data is out of scope; inputs
arrive already factored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import (
    CircleGrid,
    CoefficientSequence,
    RationalDiskFunction,
    converged_circle_mean,
)
from .tolerances import DEFAULT, Tolerances


class NotOuterError(ValueError):
    """Numerator has a root strictly inside the unit disk."""

    def __init__(self, roots_inside):
        self.roots_inside = tuple(complex(r) for r in roots_inside)
        super().__init__(f"numerator roots inside the open disk: {self.roots_inside}")


class NotInSpaceError(ValueError):
    """A hole coefficient is nonzero beyond tolerance."""

    def __init__(self, hole: int, residual: float):
        self.hole = hole
        self.residual = residual
        super().__init__(f"coefficient at hole {hole} has relative residual {residual:.3e}")


class MaxRetriesExceededError(RuntimeError):
    """The random-member generator exhausted its retry budget."""


class RootFindingError(RuntimeError):
    """The polynomial root finder did not converge."""


@dataclass(frozen=True)
class PuncturedSpace:
    """Hole set {k_1 < ... < k_M} of forbidden Taylor indices (empty = classical case)."""

    holes: tuple[int, ...]

    def __post_init__(self):
        holes = tuple(int(k) for k in self.holes)
        object.__setattr__(self, "holes", holes)
        if any(k < 1 for k in holes):
            raise ValueError(f"holes must be >= 1, got {holes}")
        if any(a >= b for a, b in zip(holes, holes[1:])):
            raise ValueError(f"holes must be strictly increasing, got {holes}")

    @property
    def size(self) -> int:
        return len(self.holes)

    @property
    def k_max(self) -> int:
        return self.holes[-1] if self.holes else 0


@dataclass(frozen=True)
class BlaschkeProduct:
    """c * prod_j (z - a_j)/(1 - conj(a_j) z) with zeros a_j in the open disk, |c| = 1."""

    zeros: tuple[complex, ...] = ()
    constant: complex = 1.0 + 0j

    def __post_init__(self):
        object.__setattr__(self, "zeros", tuple(complex(a) for a in self.zeros))
        object.__setattr__(self, "constant", complex(self.constant))
        for a in self.zeros:
            if abs(a) >= 1.0 - DEFAULT.pole_margin:
                raise ValueError(f"Blaschke zero {a} not inside the unit disk (margin)")
        if abs(abs(self.constant) - 1.0) > 1e-12:
            raise ValueError(f"constant must be unimodular, got |c| = {abs(self.constant):.17g}")

    @property
    def degree(self) -> int:
        return len(self.zeros)

    def __call__(self, z):
        acc = np.full_like(np.asarray(z, dtype=complex), self.constant) \
            if isinstance(z, np.ndarray) else self.constant
        for a in self.zeros:
            acc = acc * (z - a) / (1 - a.conjugate() * z)
        return acc

    def numerator_coefficients(self) -> tuple[complex, ...]:
        """Expanded coefficients of c * prod_j (z - a_j), constant term first."""
        coeffs = np.array([self.constant], dtype=complex)
        for a in self.zeros:
            coeffs = np.convolve(coeffs, np.array([-a, 1.0], dtype=complex))
        return tuple(coeffs)

    def as_rational(self) -> RationalDiskFunction:
        return RationalDiskFunction(self.numerator_coefficients(), self.zeros)


@dataclass(frozen=True)
class OuterRational:
    """Rational outer factor: polynomial numerator with no roots in the open disk.

    Roots on the unit circle are allowed (they matter only for the
    exposedness gate); poles are parametrized as in
    :class:`~hardyball.series.RationalDiskFunction`.
    """

    numerator: tuple[complex, ...]
    denominator_parameters: tuple[complex, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(complex(c) for c in self.numerator))
        object.__setattr__(
            self, "denominator_parameters", tuple(complex(b) for b in self.denominator_parameters)
        )
        if not any(c != 0 for c in self.numerator):
            raise ValueError("outer numerator must not be identically zero")
        inside = [r for r in numerator_roots(self.numerator) if abs(r) < 1.0 - DEFAULT.root]
        if inside:
            raise NotOuterError(inside)
        self.as_rational()  # pole-margin validation

    def as_rational(self) -> RationalDiskFunction:
        return RationalDiskFunction(self.numerator, self.denominator_parameters)

    def __call__(self, z):
        return self.as_rational()(z)

    def scale(self, s: complex) -> "OuterRational":
        return OuterRational(tuple(s * c for c in self.numerator), self.denominator_parameters)


def numerator_roots(coefficients) -> np.ndarray:
    """All roots of a polynomial given by ascending coefficients."""
    coeffs = np.array(tuple(coefficients), dtype=complex)
    if not coeffs.any():
        raise ValueError("root finding needs a nonzero polynomial")
    # np.roots wants descending order without leading zeros
    descending = coeffs[::-1]
    lead = int(np.argmax(descending != 0))
    try:
        return np.roots(descending[lead:])
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise RootFindingError(str(exc)) from exc


@dataclass(frozen=True)
class FactoredFunction:
    """f = inner * outer; the canonical pair is unique up to a unimodular constant."""

    inner: BlaschkeProduct
    outer: OuterRational

    def canonical(self) -> "FactoredFunction":
        """Fold the inner factor's unimodular constant into the outer numerator.

        The fold leaves the function, its membership and every verdict
        unchanged (the rank criterion is rotation invariant); it just pins the
        convention under which the criterion matrix is assembled.
        """
        if self.inner.constant == 1:
            return self
        return FactoredFunction(
            BlaschkeProduct(self.inner.zeros, 1.0),
            self.outer.scale(self.inner.constant),
        )

    def as_rational(self) -> RationalDiskFunction:
        return self.inner.as_rational().multiply(self.outer.as_rational())

    def __call__(self, z):
        return self.inner(z) * self.outer(z)

    def taylor(self, up_to: int) -> CoefficientSequence:
        """Exact Taylor coefficients of the product, via the rational form."""
        return self.as_rational().taylor(up_to)


@dataclass(frozen=True)
class MembershipReport:
    """Per-hole residuals of the Taylor coefficients, relative to the largest one."""

    holes: tuple[int, ...]
    residuals: tuple[float, ...]
    max_coefficient: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tolerance for r in self.residuals)

    def worst(self) -> tuple[int, float]:
        idx = int(np.argmax(self.residuals))
        return self.holes[idx], self.residuals[idx]

    def require(self) -> "MembershipReport":
        if not self.passed:
            hole, residual = self.worst()
            raise NotInSpaceError(hole, residual)
        return self


def check_membership(
    f: FactoredFunction, space: PuncturedSpace, tol: Tolerances = DEFAULT
) -> MembershipReport:
    """Check that every hole coefficient of f vanishes (relatively to max |f^(k)|)."""
    if not space.holes:
        return MembershipReport((), (), 0.0, tol.membership)
    coeffs = f.taylor(space.k_max).to_array(space.k_max)
    scale = float(np.abs(coeffs).max())
    if scale == 0.0:
        return MembershipReport(space.holes, (0.0,) * space.size, 0.0, tol.membership)
    residuals = tuple(float(abs(coeffs[k])) / scale for k in space.holes)
    return MembershipReport(space.holes, residuals, scale, tol.membership)


def membership_report_of(
    coeffs: np.ndarray, space: PuncturedSpace, tol: Tolerances = DEFAULT
) -> MembershipReport:
    """Membership residuals for an already-expanded coefficient vector 0..k_M."""
    if not space.holes:
        return MembershipReport((), (), 0.0, tol.membership)
    scale = float(np.abs(coeffs).max())
    if scale == 0.0:
        return MembershipReport(space.holes, (0.0,) * space.size, 0.0, tol.membership)
    residuals = tuple(float(abs(coeffs[k])) / scale for k in space.holes)
    return MembershipReport(space.holes, residuals, scale, tol.membership)


@dataclass(frozen=True)
class OuterCheck:
    is_outer: bool
    roots: tuple[complex, ...]
    roots_inside: tuple[complex, ...]
    roots_on_circle: tuple[complex, ...]
    log_mean_residual: float | None  # None when the diagnostic was skipped


# cross-check needs log|F| smooth enough for the doubling ladder; skip it when
# roots sit closer to the circle than this
_CROSS_CHECK_MARGIN = 1e-3


def check_outer(F: OuterRational, tol: Tolerances = DEFAULT) -> OuterCheck:
    """Classify outerness by root location, cross-checked by the log-mean identity.

    For rationals with poles outside the closed disk, outer is equivalent to
    the numerator having no roots in the open disk.  When no root is close to
    the circle, the verdict is additionally cross-checked against
    mean log|F| = log|F(0)| by quadrature (diagnostic only; root location
    stays authoritative).
    """
    roots = tuple(complex(r) for r in numerator_roots(F.numerator))
    inside = tuple(r for r in roots if abs(r) < 1.0 - tol.root)
    on_circle = tuple(r for r in roots if abs(abs(r) - 1.0) <= tol.root)
    is_outer = not inside
    residual = None
    clear_of_circle = all(abs(abs(r) - 1.0) > _CROSS_CHECK_MARGIN for r in roots)
    if is_outer and clear_of_circle and F.numerator[0] != 0:
        mean, _ = converged_circle_mean(lambda z: np.log(np.abs(F(z))), tol, target=1e-10)
        residual = abs(mean - float(np.log(abs(F.numerator[0]))))
    return OuterCheck(is_outer, roots, inside, on_circle, residual)


def l1_norm(f: FactoredFunction, tol: Tolerances = DEFAULT) -> float:
    """Certified circle average of |f| (grid doubling)."""
    value, _ = converged_circle_mean(lambda z: np.abs(f(z)), tol)
    return value


def normalize(f: FactoredFunction, tol: Tolerances = DEFAULT) -> tuple[FactoredFunction, float]:
    """Rescale the outer numerator so the product has unit circle average.

    Returns (normalized function, applied scale).  Only the outer factor is
    touched, preserving the factorization shape.
    """
    norm = l1_norm(f, tol)
    if norm == 0.0:
        raise ValueError("cannot normalize the zero function")
    scale = 1.0 / norm
    return FactoredFunction(f.inner, f.outer.scale(scale)), scale


# the generator redraws when numerator roots come this close to the circle:
# such members are legal inputs but need enormous quadrature grids
_SAMPLE_CIRCLE_MARGIN = 1e-3


def sample_member(
    space: PuncturedSpace,
    zeros,
    denominator_parameters,
    numerator_degree: int,
    seed: int,
    tol: Tolerances = DEFAULT,
) -> FactoredFunction:
    """Draw a random unit-norm member of the punctured space with the given factor shape.

    The hole constraints are linear in the outer numerator coefficients, so a
    random draw is projected onto their null space and kept if the projected
    numerator is outer.  Deterministic for a fixed seed.  Raises
    :class:`MaxRetriesExceededError` when no draw passes the outer check
    (e.g. when the constraints force a root at the origin).
    """
    rng = np.random.default_rng(seed)
    inner = BlaschkeProduct(tuple(zeros))
    den = tuple(denominator_parameters)
    d = int(numerator_degree)
    if d < 0:
        raise ValueError("numerator degree must be >= 0")

    # weight function: coefficient t of the numerator contributes
    # w_{k-t} to the k-th Taylor coefficient of f
    weight = RationalDiskFunction(
        inner.numerator_coefficients(), inner.zeros + den
    ).taylor(space.k_max)
    constraints = np.array(
        [[weight.at(k - t) for t in range(d + 1)] for k in space.holes], dtype=complex
    )
    if constraints.size:
        _, s, vh = np.linalg.svd(constraints)
        cutoff = max(constraints.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
        rank = int((s > cutoff).sum())
        null_basis = vh[rank:].conj().T  # (d+1) x nullity, orthonormal columns
    else:
        null_basis = np.eye(d + 1, dtype=complex)
    if null_basis.shape[1] == 0:
        raise MaxRetriesExceededError("hole constraints leave no free numerator coefficients")

    decay = 0.5 ** np.arange(d + 1)
    for _ in range(tol.sample_retries):
        raw = (rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)) * decay
        candidate = null_basis @ (null_basis.conj().T @ raw)
        if np.abs(candidate).max() < 1e-12:
            continue
        roots = numerator_roots(candidate)
        if any(abs(r) < 1.0 + _SAMPLE_CIRCLE_MARGIN for r in roots):
            continue  # not outer, or too close to the circle to quadrature well
        outer = OuterRational(tuple(candidate), den)
        member, _ = normalize(FactoredFunction(inner, outer), tol)
        check_membership(member, space, tol).require()
        return member
    raise MaxRetriesExceededError(
        f"no outer numerator found in {tol.sample_retries} draws (degree {d}, holes {space.holes})"
    )


def unimodularity_defect(inner: BlaschkeProduct, grid: CircleGrid) -> float:
    """max over grid nodes of ||I(node)| - 1| (should be ~1e-15 for valid data)."""
    return float(np.abs(np.abs(inner(grid.nodes)) - 1.0).max())
