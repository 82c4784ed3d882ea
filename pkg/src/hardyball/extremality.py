"""The rank criterion: criterion matrix assembly, numeric rank, verdicts.

A unit-norm member f = I*F of the punctured space (holes k_1 < ... < k_M,
inner degree m) is extreme for the unit ball iff

  (a) m <= M, and
  (b) the real 2M x (2m+1) block criterion matrix built from the Taylor
      coefficients of F / prod_j (1 - conj(a_j) z)^2 has rank exactly 2m.

The matrix encodes, per hole, the real and imaginary parts of the linear map
sending a symmetric polynomial's coefficient vector to the hole coefficient
of (polynomial * weighted outer factor); its kernel always contains the
canonical vector induced by the inner factor itself, so extremality is
exactly kernel-dimension one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FactoredFunction, PuncturedSpace, check_membership
from .series import CoefficientSequence, RationalDiskFunction, polyval_ascending
from .tolerances import DEFAULT, Tolerances

EXTREME = "extreme"
NON_EXTREME = "non_extreme"
BORDERLINE = "borderline"


@dataclass(frozen=True)
class SymmetricPolynomial:
    """Polynomial p of degree <= 2N whose coefficients satisfy
    p^(N-k) = conj(p^(N+k)); equivalently z^(-N) p(z) is real on the circle.

    Identified with the real vector (a_0, a_1..a_N, b_1..b_N) of length 2N+1
    via gamma_0 = 2 a_0, gamma_l = a_l + i b_l, where gamma_l = p^(N+l).
    """

    order: int
    vector: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "vector", tuple(float(v) for v in self.vector))
        if len(self.vector) != 2 * self.order + 1:
            raise ValueError(
                f"vector length {len(self.vector)} != 2*{self.order}+1"
            )

    @property
    def upper(self) -> np.ndarray:
        """gamma_0..gamma_N (the coefficients at and above the centre degree)."""
        n = self.order
        alphas = np.array(self.vector[: n + 1])
        betas = np.concatenate([[0.0], np.array(self.vector[n + 1 :])])
        gammas = alphas + 1j * betas
        gammas[0] = 2.0 * alphas[0]
        return gammas

    def coefficients(self) -> np.ndarray:
        """Dense complex coefficients p_0..p_{2N} (ascending)."""
        n = self.order
        gammas = self.upper
        coeffs = np.zeros(2 * n + 1, dtype=complex)
        coeffs[n:] = gammas
        coeffs[:n] = np.conj(gammas[1:][::-1])
        return coeffs

    def __call__(self, z):
        return polyval_ascending(tuple(self.coefficients()), z)

    @classmethod
    def from_coefficients(cls, coeffs, atol: float = 1e-9) -> "SymmetricPolynomial":
        """Read a coefficient vector back, asserting the conjugate symmetry."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if len(coeffs) % 2 == 0:
            raise ValueError("symmetric polynomials have odd coefficient count 2N+1")
        n = (len(coeffs) - 1) // 2
        scale = float(np.abs(coeffs).max()) or 1.0
        defect = float(np.abs(coeffs[:n][::-1] - np.conj(coeffs[n + 1 :])).max()) if n else 0.0
        defect = max(defect, abs(coeffs[n].imag))
        if defect > atol * scale:
            raise ValueError(f"coefficients are not conjugate-symmetric (defect {defect:.3e})")
        vector = [coeffs[n].real / 2.0]
        vector += [coeffs[n + l].real for l in range(1, n + 1)]
        vector += [coeffs[n + l].imag for l in range(1, n + 1)]
        return cls(n, tuple(vector))


def canonical_kernel_vector(zeros) -> SymmetricPolynomial:
    """The symmetric polynomial prod_j (z - a_j)(1 - conj(a_j) z).

    Its coefficient vector always lies in the kernel of the criterion matrix
    (the product times the weighted outer factor reproduces f itself, whose
    hole coefficients vanish); extremality means it spans that kernel.
    """
    coeffs = np.array([1.0 + 0j])
    for a in zeros:
        a = complex(a)
        coeffs = np.convolve(coeffs, np.array([-a, 1.0]))
        coeffs = np.convolve(coeffs, np.array([1.0, -a.conjugate()]))
    return SymmetricPolynomial.from_coefficients(coeffs, atol=1e-12)


def hole_constraint_value(
    p: SymmetricPolynomial, coeffs: CoefficientSequence, k: int
) -> complex:
    """Taylor coefficient at index k of (p * series with the given coefficients).

    Evaluates sum_{l=1..N} c_{k+l-N} conj(gamma_l) + sum_{l=0..N} c_{k-l-N} gamma_l
    exactly; the real/imaginary parts of this bilinear form are what the rows
    of the criterion matrix tabulate, so this is its independent audit oracle.
    """
    n = p.order
    gammas = p.upper
    acc = 0j
    for l in range(1, n + 1):
        acc += coeffs.at(k + l - n) * gammas[l].conjugate()
    for l in range(0, n + 1):
        acc += coeffs.at(k - l - n) * gammas[l]
    return acc


@dataclass(frozen=True)
class CriterionMatrix:
    """Block matrix [[re_sum, im_diff], [im_sum, -re_diff]] with 2M rows, 2m+1 columns.

    With c_r the stored coefficients (zero for r < 0) and row hole k_j:
    re_sum[j, l]  = Re c_{k_j+l-m} + Re c_{k_j-l-m}   (l = 0..m)
    im_sum[j, l]  = Im c_{k_j+l-m} + Im c_{k_j-l-m}   (l = 0..m)
    re_diff[j, l] = Re c_{k_j+l-m} - Re c_{k_j-l-m}   (l = 1..m)
    im_diff[j, l] = Im c_{k_j+l-m} - Im c_{k_j-l-m}   (l = 1..m)
    """

    holes: tuple[int, ...]
    m: int
    re_sum: np.ndarray
    im_sum: np.ndarray
    re_diff: np.ndarray
    im_diff: np.ndarray
    assembled: np.ndarray
    coefficients: CoefficientSequence

    @property
    def rows(self) -> int:
        return 2 * len(self.holes)

    @property
    def columns(self) -> int:
        return 2 * self.m + 1

    def entry_defect(self) -> float:
        """Max deviation of the stored blocks from their defining identities."""
        rebuilt = assemble_criterion_matrix(self.coefficients, self.holes, self.m)
        if self.assembled.size == 0:
            return 0.0
        return float(np.abs(self.assembled - rebuilt.assembled).max())


def assemble_criterion_matrix(
    coeffs: CoefficientSequence, holes, m: int
) -> CriterionMatrix:
    """Assemble the criterion blocks from a coefficient sequence (pure tabulation)."""
    holes = tuple(int(k) for k in holes)
    M = len(holes)
    re = lambda r: coeffs.at(r).real
    im = lambda r: coeffs.at(r).imag
    re_sum = np.array([[re(k + l - m) + re(k - l - m) for l in range(m + 1)] for k in holes],
                      dtype=float).reshape(M, m + 1)
    im_sum = np.array([[im(k + l - m) + im(k - l - m) for l in range(m + 1)] for k in holes],
                      dtype=float).reshape(M, m + 1)
    re_diff = np.array([[re(k + l - m) - re(k - l - m) for l in range(1, m + 1)] for k in holes],
                       dtype=float).reshape(M, m)
    im_diff = np.array([[im(k + l - m) - im(k - l - m) for l in range(1, m + 1)] for k in holes],
                       dtype=float).reshape(M, m)
    assembled = np.block([[re_sum, im_diff], [im_sum, -re_diff]]) if M else \
        np.zeros((0, 2 * m + 1))
    return CriterionMatrix(holes, m, re_sum, im_sum, re_diff, im_diff, assembled, coeffs)


def criterion_coefficients(f: FactoredFunction, up_to: int) -> CoefficientSequence:
    """Taylor coefficients of F(z) * prod_j (1 - conj(a_j) z)^(-2).

    The squared factors are appended to the outer denominator parameter list,
    so the expansion stays an exact recurrence.  Indices below zero read as
    zero by the sequence convention.
    """
    f = f.canonical()
    doubled = tuple(f.inner.zeros) * 2
    weighted = RationalDiskFunction(
        f.outer.numerator, f.outer.denominator_parameters + doubled
    )
    return weighted.taylor(up_to)


def build_criterion_matrix(f: FactoredFunction, space: PuncturedSpace) -> CriterionMatrix:
    """Criterion matrix of a factored function for the given hole set."""
    f = f.canonical()
    m = f.inner.degree
    coeffs = criterion_coefficients(f, space.k_max)
    return assemble_criterion_matrix(coeffs, space.holes, m)


@dataclass(frozen=True)
class RankResult:
    rank: int
    kernel: np.ndarray  # rows form an orthonormal kernel basis
    singular_values: np.ndarray
    borderline: bool


def numeric_rank(
    matrix: np.ndarray, tol_rank: float = DEFAULT.rank, scale_floor: float = 0.0
) -> RankResult:
    """SVD rank with relative cutoff and an explicit borderline band.

    rank = #{sigma > tol_rank * max(sigma_max, scale_floor)}; the kernel basis
    is the trailing right singular vectors.  Any singular value within one
    decade of the cutoff flags the result borderline rather than silently
    classifying it.

    ``scale_floor`` anchors the cutoff to the problem's own coefficient scale:
    a matrix whose largest singular value sits at rounding level relative to
    the coefficients it was built from is the zero matrix it represents (the
    degree-zero inner case produces exactly such matrices), which a purely
    sigma_max-relative cutoff would misread as rank one.
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if not np.isfinite(matrix).all():
        raise ValueError("matrix must be finite")
    if matrix.shape[0] == 0:
        return RankResult(0, np.eye(matrix.shape[1]), np.zeros(0), False)
    _, s, vh = np.linalg.svd(matrix)
    smax = float(s[0]) if s.size else 0.0
    if max(smax, scale_floor) == 0.0:
        return RankResult(0, np.eye(matrix.shape[1]), s, False)
    cutoff = tol_rank * max(smax, scale_floor)
    rank = int((s > cutoff).sum())
    borderline = bool(((s >= 0.1 * cutoff) & (s <= 10.0 * cutoff)).any())
    return RankResult(rank, vh[rank:], s, borderline)


@dataclass(frozen=True)
class ConditionA:
    """Inner-degree bound: deg I = m must not exceed the number of holes."""

    m: int
    M: int

    @property
    def holds(self) -> bool:
        return self.m <= self.M


@dataclass(frozen=True)
class ExtremalityVerdict:
    status: str  # extreme | non_extreme | borderline
    rank: int
    kernel_basis: np.ndarray
    condition_a: ConditionA
    singular_values: np.ndarray
    matrix: CriterionMatrix
    backend: str = "svd"

    @property
    def target_rank(self) -> int:
        return 2 * self.condition_a.m

    @property
    def kernel_dimension(self) -> int:
        return self.kernel_basis.shape[0]


def decide_extreme(
    f: FactoredFunction,
    space: PuncturedSpace,
    tol: Tolerances = DEFAULT,
    backend: str = "svd",
) -> ExtremalityVerdict:
    """Decide extremality of f (assumed unit norm; the verdict is scale invariant).

    Refuses to classify functions outside the space (raises
    :class:`~hardyball.model.NotInSpaceError`).  The inner-degree condition is
    checked first; when it fails the function is non-extreme regardless of the
    matrix, whose rank is still reported for diagnostics.  ``backend`` is
    either "svd" (default) or "exact" (fraction arithmetic on the binary-exact
    rational lift of the inputs; no tolerance, no borderline band).
    """
    f = f.canonical()
    check_membership(f, space, tol).require()
    m = f.inner.degree
    cond = ConditionA(m, space.size)
    matrix = build_criterion_matrix(f, space)

    if backend == "exact":
        from .exactrank import exact_rank_of_criterion

        rank, kernel = exact_rank_of_criterion(f, space)
        result = RankResult(rank, kernel, np.zeros(0), False)
    elif backend == "svd":
        scale = float(np.abs(matrix.coefficients.to_array(space.k_max)).max()) \
            if space.holes else 0.0
        result = numeric_rank(matrix.assembled, tol.rank, scale_floor=scale)
    else:
        raise ValueError(f"unknown rank backend {backend!r}")

    if not cond.holds:
        # rank <= 2M < 2m is structural: the matrix only has 2M rows
        assert result.rank < 2 * m
        status = NON_EXTREME
    elif result.borderline:
        status = BORDERLINE
    elif result.rank == 2 * m:
        status = EXTREME
    else:
        status = NON_EXTREME
    return ExtremalityVerdict(
        status, result.rank, result.kernel, cond, result.singular_values, matrix, backend
    )


@dataclass(frozen=True)
class DeltaResult:
    """Single-hole fast path: delta = |c_{k-2}|^2 - |c_k|^2 decides rank 2."""

    delta: float
    status: str
    magnitudes: tuple[float, float]  # (|c_{k-2}|^2, |c_k|^2)


def single_hole_delta(
    f: FactoredFunction, k: int, tol: Tolerances = DEFAULT
) -> DeltaResult:
    """Determinant shortcut for one hole and inner degree <= 1.

    For m = 1 the criterion matrix has rank 2 iff delta != 0; the relative
    sign test uses |delta| > tol.delta * (|c_{k-2}|^2 + |c_k|^2).  For m = 0
    the function is outer, always extreme: delta is the +inf sentinel.
    """
    f = f.canonical()
    m = f.inner.degree
    if m not in (0, 1):
        raise ValueError(f"single-hole shortcut needs inner degree 0 or 1, got {m}")
    if m == 0:
        return DeltaResult(float("inf"), EXTREME, (float("inf"), 0.0))
    coeffs = criterion_coefficients(f, k)
    lo = abs(coeffs.at(k - 2)) ** 2
    hi = abs(coeffs.at(k)) ** 2
    delta = lo - hi
    status = EXTREME if abs(delta) > tol.delta * (lo + hi) else NON_EXTREME
    return DeltaResult(delta, status, (lo, hi))


def kernel_alignment(verdict: ExtremalityVerdict, zeros) -> float:
    """|cos angle| between the computed kernel and the canonical vector.

    For an extreme verdict the kernel is one-dimensional and must be the
    canonical vector up to scale; values below 1 - 1e-8 indicate a
    misclassification.
    """
    canonical = np.array(canonical_kernel_vector(zeros).vector)
    canonical /= np.linalg.norm(canonical)
    kernel = verdict.kernel_basis
    if kernel.shape[0] == 0:
        return 0.0
    # projection of the canonical vector onto the kernel subspace
    return float(np.linalg.norm(kernel @ canonical))
