"""Extreme and exposed points of the unit ball in punctured Hardy spaces.

Decides, for an explicitly factored unit-norm function (finite Blaschke
inner factor times rational outer factor) with prescribed spectral holes,
whether it is an extreme point of the unit ball — and certifies the answer:
non-extreme verdicts come with a perturbation witness that re-verifies from
first principles, extreme verdicts with a kernel-uniqueness check and a
sufficient exposedness gate.
"""

from .certificates import (
    DegenerateKernelError,
    ExposednessResult,
    PerturbationWitness,
    WitnessReport,
    check_exposed,
    degree_overflow_witness,
    kernel_witness,
    make_witness,
    overflow_operator,
    verify_witness,
    witness_h_values,
)
from .extremality import (
    BORDERLINE,
    EXTREME,
    NON_EXTREME,
    CriterionMatrix,
    DeltaResult,
    ExtremalityVerdict,
    SymmetricPolynomial,
    assemble_criterion_matrix,
    build_criterion_matrix,
    canonical_kernel_vector,
    criterion_coefficients,
    decide_extreme,
    hole_constraint_value,
    kernel_alignment,
    numeric_rank,
    single_hole_delta,
)
from .model import (
    BlaschkeProduct,
    FactoredFunction,
    MaxRetriesExceededError,
    MembershipReport,
    NotInSpaceError,
    NotOuterError,
    OuterRational,
    PuncturedSpace,
    check_membership,
    check_outer,
    l1_norm,
    normalize,
    sample_member,
)
from .series import (
    CircleGrid,
    CoefficientSequence,
    PoleMarginError,
    QuadratureConvergenceError,
    RationalDiskFunction,
    circle_l1_norm,
    converged_circle_mean,
    convolve,
    expand_rational,
    log_mean_modulus,
)
from .tolerances import DEFAULT, Tolerances

__version__ = "0.1.0"
