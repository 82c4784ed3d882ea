"""Machine-checkable evidence for verdicts.

A non-extreme verdict is certified by a perturbation witness: a symmetric
polynomial p (plus, when the inner degree overflows the hole count, the
spare Blaschke zeros) inducing a real nonconstant h on the circle with
f*h still in the space.  With c the weighted mean of h and epsilon small
enough to keep 1 +- epsilon*(h-c) positive, the functions
f*(1 +- epsilon*(h-c)) are two distinct unit-ball members whose midpoint is
f — the literal negation of extremality.  Verification recomputes everything
from the witness data and quadrature/expansion primitives alone; it never
consults the criterion matrix, so certification is independent of the
decision pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extremality import (
    EXTREME,
    ExtremalityVerdict,
    SymmetricPolynomial,
    assemble_criterion_matrix,
    canonical_kernel_vector,
    numeric_rank,
)
from .model import (
    FactoredFunction,
    MembershipReport,
    PuncturedSpace,
    membership_report_of,
    numerator_roots,
)
from .series import CircleGrid, RationalDiskFunction, converged_circle_mean
from .tolerances import DEFAULT, Tolerances

KERNEL_PATH = "kernel_path"
DEGREE_OVERFLOW_PATH = "degree_overflow_path"

# 1 +- epsilon*(h-c) must stay at least this positive on the grid; the
# construction guarantees 1/2, so anything below flags a tampered epsilon
POSITIVITY_FLOOR = 0.25


class DegenerateKernelError(RuntimeError):
    """Every kernel vector is parallel to the canonical one.

    Contradicts a rank-deficient verdict; signals a tolerance
    misclassification that should be escalated to borderline.
    """


@dataclass(frozen=True)
class PerturbationWitness:
    """Data exhibiting f as a midpoint of two distinct ball members."""

    polynomial: SymmetricPolynomial
    phi2_zeros: tuple[complex, ...]  # spare inner zeros beyond the first N (overflow path)
    epsilon: float
    recenter: float
    provenance: str  # kernel_path | degree_overflow_path

    def __post_init__(self):
        object.__setattr__(self, "phi2_zeros", tuple(complex(a) for a in self.phi2_zeros))


@dataclass(frozen=True)
class ExposednessResult:
    status: str  # exposed | not_extreme | unknown
    circle_roots: tuple[complex, ...]


@dataclass(frozen=True)
class WitnessReport:
    """Unconditional recomputation of every witness property, with residuals."""

    h_realness_residual: float
    h_variation: float
    positivity_margin: float
    hole_residuals: tuple[tuple[int, float], ...]
    norm_f: float
    norm_plus: float
    norm_minus: float
    membership_plus: MembershipReport | None
    membership_minus: MembershipReport | None
    failures: tuple[str, ...]

    @property
    def verifies(self) -> bool:
        return not self.failures

    @property
    def norm_plus_residual(self) -> float:
        return abs(self.norm_plus - self.norm_f)

    @property
    def norm_minus_residual(self) -> float:
        return abs(self.norm_minus - self.norm_f)


def _blaschke_values(zeros, z):
    acc = np.ones_like(z)
    for a in zeros:
        a = complex(a)
        acc = acc * (z - a) / (1 - a.conjugate() * z)
    return acc


def witness_h_values(f: FactoredFunction, witness: PerturbationWitness, z: np.ndarray):
    """h = p * Phi_N * phi2 / I on given circle nodes (N = order of p).

    Phi_N runs over the first N inner zeros of f; phi2 over the witness's
    spare zeros.  For valid witnesses h is real on the circle.
    """
    f = f.canonical()
    n = witness.polynomial.order
    first = f.inner.zeros[:n]
    vals = witness.polynomial(z)
    for a in first:
        vals = vals / (1 - a.conjugate() * z) ** 2
    vals = vals * _blaschke_values(witness.phi2_zeros, z)
    return vals / f.inner(z)


def _perturbation_product(f: FactoredFunction, witness: PerturbationWitness) -> RationalDiskFunction:
    """The rational function F * G = F * p * Phi_N * phi2 (equals f * h on the circle)."""
    f = f.canonical()
    n = witness.polynomial.order
    first = f.inner.zeros[:n]
    num = np.array(witness.polynomial.coefficients())
    for a in witness.phi2_zeros:
        num = np.convolve(num, np.array([-a, 1.0 + 0j]))
    g = RationalDiskFunction(tuple(num), tuple(first) * 2 + witness.phi2_zeros)
    return f.outer.as_rational().multiply(g)


def _package_witness(
    f: FactoredFunction,
    polynomial: SymmetricPolynomial,
    phi2_zeros: tuple[complex, ...],
    provenance: str,
    tol: Tolerances,
) -> PerturbationWitness:
    """Fix the recentering constant and step size for a chosen polynomial.

    c is the quadrature mean of |f| h over the circle divided by the mean of
    |f| (the two coincide for unit-norm f), which kills the first-order norm
    change; epsilon = 1/(2 sup|h - c|) keeps both perturbation factors >= 1/2.
    """
    probe = PerturbationWitness(polynomial, phi2_zeros, 1.0, 0.0, provenance)

    def weighted_h(z):
        return np.abs(f(z)) * np.real(witness_h_values(f, probe, z))

    mean_fh, _ = converged_circle_mean(weighted_h, tol)
    norm_f, _ = converged_circle_mean(lambda z: np.abs(f(z)), tol)
    c = mean_fh / norm_f
    sup = 0.0
    for n in (8192, 16384):
        h = np.real(witness_h_values(f, probe, CircleGrid(n).nodes))
        sup = max(sup, float(np.abs(h - c).max()))
    if sup == 0.0:
        raise DegenerateKernelError("perturbation h is constant on the circle")
    return PerturbationWitness(polynomial, phi2_zeros, 1.0 / (2.0 * sup), c, provenance)


def kernel_witness(
    f: FactoredFunction,
    space: PuncturedSpace,
    verdict: ExtremalityVerdict,
    tol: Tolerances = DEFAULT,
) -> PerturbationWitness:
    """Witness from a rank-deficient criterion matrix (inner degree within bound).

    Strips the canonical direction out of the computed kernel and induces the
    perturbation polynomial from the largest remainder; a kernel containing
    nothing beyond the canonical vector contradicts the rank deficiency and
    raises :class:`DegenerateKernelError`.
    """
    f = f.canonical()
    m = f.inner.degree
    if not verdict.condition_a.holds:
        raise ValueError("inner degree exceeds hole count: use the degree-overflow path")
    if verdict.status == EXTREME or verdict.kernel_dimension < 2:
        raise ValueError("kernel witness needs a rank-deficient (non-extreme) verdict")
    canonical = np.array(canonical_kernel_vector(f.inner.zeros).vector)
    canonical = canonical / np.linalg.norm(canonical)
    kernel = verdict.kernel_basis
    remainders = kernel - np.outer(kernel @ canonical, canonical)
    norms = np.linalg.norm(remainders, axis=1)
    best = int(np.argmax(norms))
    if norms[best] <= 1e-10:
        raise DegenerateKernelError(
            "all kernel vectors are parallel to the canonical vector"
        )
    vector = remainders[best] / norms[best]
    polynomial = SymmetricPolynomial(m, tuple(vector))
    return _package_witness(f, polynomial, (), KERNEL_PATH, tol)


def overflow_operator(f: FactoredFunction, space: PuncturedSpace, tol: Tolerances = DEFAULT):
    """Hole-constraint operator for the degree-overflow construction.

    Splits the inner zeros as (first N = M+1 | rest), replaces the weighted
    outer coefficients by those of F * Phi_N * phi2, and assembles the same
    block matrix with N in place of the inner degree.  Returns the matrix and
    its rank decomposition; the map has 2M rows and 2N+1 = 2M+3 columns, so
    the kernel always has dimension at least 3.

    Inner factors in this data model are always finite Blaschke products, so
    the construction applies to them directly; no preliminary disk-automorphism
    shift of the inner factor is needed to extract the N + rest zero split.
    """
    f = f.canonical()
    m = f.inner.degree
    M = space.size
    if m <= M:
        raise ValueError("degree overflow construction needs inner degree > hole count")
    n = M + 1
    first, rest = f.inner.zeros[:n], f.inner.zeros[n:]
    num = np.array(f.outer.numerator, dtype=complex)
    for a in rest:
        num = np.convolve(num, np.array([-a, 1.0 + 0j]))
    transfer = RationalDiskFunction(
        tuple(num), f.outer.denominator_parameters + tuple(first) * 2 + rest
    ).taylor(space.k_max)
    matrix = assemble_criterion_matrix(transfer, space.holes, n)
    return matrix, numeric_rank(matrix.assembled, tol.rank)


def degree_overflow_witness(
    f: FactoredFunction, space: PuncturedSpace, tol: Tolerances = DEFAULT
) -> PerturbationWitness:
    """Witness for inner degree exceeding the hole count.

    Any kernel vector of :func:`overflow_operator` whose induced h is
    nonconstant works; the largest-variation candidate is selected.
    """
    f = f.canonical()
    n = space.size + 1
    rest = f.inner.zeros[n:]
    _, result = overflow_operator(f, space, tol)
    kernel = result.kernel
    # structural: rank <= 2M, columns = 2M+3
    assert kernel.shape[0] >= 3, "overflow kernel below dimension 3 signals a pipeline bug"

    nodes = CircleGrid(4096).nodes
    variations = []
    for vec in kernel:
        candidate = PerturbationWitness(
            SymmetricPolynomial(n, tuple(vec)), rest, 1.0, 0.0, DEGREE_OVERFLOW_PATH
        )
        h = np.real(witness_h_values(f, candidate, nodes))
        variations.append(float(h.max() - h.min()))
    best = int(np.argmax(variations))
    assert variations[best] > tol.witness_variation, "no nonconstant kernel direction found"
    polynomial = SymmetricPolynomial(n, tuple(kernel[best]))
    return _package_witness(f, polynomial, rest, DEGREE_OVERFLOW_PATH, tol)


def make_witness(
    f: FactoredFunction,
    space: PuncturedSpace,
    verdict: ExtremalityVerdict,
    tol: Tolerances = DEFAULT,
) -> PerturbationWitness:
    """Dispatch to the kernel or degree-overflow construction."""
    if verdict.condition_a.holds:
        return kernel_witness(f, space, verdict, tol)
    return degree_overflow_witness(f, space, tol)


def verify_witness(
    f: FactoredFunction,
    space: PuncturedSpace,
    witness: PerturbationWitness,
    tol: Tolerances = DEFAULT,
) -> WitnessReport:
    """Recheck a witness from first principles; failures are reported, not raised.

    Checks: h real and nonconstant on the circle; 1 +- epsilon*(h - c) keeps a
    positive margin; f*h stays in the space (exact expansion of F*G); both
    perturbation endpoints have the same circle average as f and pass
    membership.
    """
    failures: list[str] = []
    try:
        f = f.canonical()
        grid = CircleGrid(8192)
        h = witness_h_values(f, witness, grid.nodes)
        realness = float(np.abs(h.imag).max())
        h_re = h.real
        variation = float(h_re.max() - h_re.min())
        margin = 1.0 - witness.epsilon * float(np.abs(h_re - witness.recenter).max())

        eps, c = witness.epsilon, witness.recenter
        if space.holes:
            product_coeffs = _perturbation_product(f, witness).taylor(space.k_max) \
                .to_array(space.k_max)
            scale = float(np.abs(product_coeffs).max())
            if scale == 0.0:
                failures.append("perturbation product is identically zero to expansion order")
                scale = 1.0
            hole_residuals = tuple(
                (k, float(abs(product_coeffs[k])) / scale) for k in space.holes
            )
            f_coeffs = f.taylor(space.k_max).to_array(space.k_max)
            plus = f_coeffs + eps * (product_coeffs - c * f_coeffs)
            minus = f_coeffs - eps * (product_coeffs - c * f_coeffs)
            membership_plus = membership_report_of(plus, space, tol)
            membership_minus = membership_report_of(minus, space, tol)
        else:
            hole_residuals = ()
            membership_plus = membership_report_of(np.zeros(1, dtype=complex), space, tol)
            membership_minus = membership_plus

        norm_f, _ = converged_circle_mean(lambda z: np.abs(f(z)), tol)

        def endpoint_modulus(sign):
            def integrand(z):
                factor = 1.0 + sign * eps * (np.real(witness_h_values(f, witness, z)) - c)
                return np.abs(f(z)) * np.abs(factor)

            return integrand

        norm_plus, _ = converged_circle_mean(endpoint_modulus(+1.0), tol)
        norm_minus, _ = converged_circle_mean(endpoint_modulus(-1.0), tol)

        if realness > tol.witness_realness:
            failures.append(f"h not real on the circle (residual {realness:.3e})")
        if variation <= tol.witness_variation:
            failures.append(f"h is constant to tolerance (variation {variation:.3e})")
        if margin < POSITIVITY_FLOOR:
            failures.append(
                f"positivity margin {margin:.3e} below {POSITIVITY_FLOOR} (epsilon too large)"
            )
        for k, residual in hole_residuals:
            if residual > tol.witness_hole:
                failures.append(f"perturbation leaves the space at hole {k} (residual {residual:.3e})")
        if abs(norm_plus - norm_f) > tol.witness_norm:
            failures.append(f"plus endpoint norm off by {abs(norm_plus - norm_f):.3e}")
        if abs(norm_minus - norm_f) > tol.witness_norm:
            failures.append(f"minus endpoint norm off by {abs(norm_minus - norm_f):.3e}")
        if not membership_plus.passed:
            failures.append("plus endpoint fails membership")
        if not membership_minus.passed:
            failures.append("minus endpoint fails membership")

        return WitnessReport(
            realness, variation, margin, hole_residuals,
            norm_f, norm_plus, norm_minus,
            membership_plus, membership_minus, tuple(failures),
        )
    except Exception as exc:  # invalid witness data: report, never raise
        failures.append(f"witness data rejected: {exc}")
        return WitnessReport(
            float("nan"), float("nan"), float("nan"), (),
            float("nan"), float("nan"), float("nan"),
            None, None, tuple(failures),
        )


def check_exposed(
    f: FactoredFunction,
    space: PuncturedSpace,
    verdict: ExtremalityVerdict,
    tol: Tolerances = DEFAULT,
) -> ExposednessResult:
    """Sufficient exposedness gate: extreme plus 1/f integrable on the circle.

    For rational f with a finite Blaschke inner factor, 1/f is integrable iff
    the outer numerator has no roots on the unit circle (|I| = 1 there, and a
    boundary zero of any order makes 1/|f| non-integrable).  The condition is
    sufficient only, so circle roots yield "unknown", never a guess.
    """
    if verdict.status != EXTREME:
        return ExposednessResult("not_extreme", ())
    roots = numerator_roots(f.outer.numerator)
    circle_roots = tuple(complex(r) for r in roots if abs(abs(r) - 1.0) <= tol.root)
    if circle_roots:
        return ExposednessResult("unknown", circle_roots)
    return ExposednessResult("exposed", ())
