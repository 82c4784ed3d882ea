"""Numerical tolerances shared across the decision pipeline.

All thresholds live in one frozen dataclass so that a single object can be
threaded through analysis, certificate generation and verification, and so
that CLI flags / environment variables can override individual knobs without
touching call sites.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # pole-location margin: denominator parameters must satisfy |b| < 1 - pole_margin
    pole_margin: float = 1e-9
    # quadrature: grid doubling stops once successive means agree within quad
    quad: float = 1e-10
    quad_start_n: int = 1024
    quad_max_n: int = 2 ** 20
    # relative singular-value cutoff for the rank decision
    rank: float = 1e-8
    # numerator roots within root of the unit circle count as on-circle
    root: float = 1e-8
    # relative hole-coefficient threshold for space membership
    membership: float = 1e-9
    # relative threshold for the single-hole determinant sign test
    delta: float = 1e-8
    # witness checks
    witness_realness: float = 1e-10
    witness_variation: float = 1e-6
    witness_hole: float = 1e-9
    witness_norm: float = 1e-7
    # random-member generator
    sample_retries: int = 500

    def override(self, **kwargs) -> "Tolerances":
        """Copy with the given fields replaced (None values are ignored)."""
        updates = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **updates) if updates else self


DEFAULT = Tolerances()
