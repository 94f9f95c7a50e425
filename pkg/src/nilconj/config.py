"""Numerical tolerance knobs, grouped so the CLI can override them."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Default tolerances used across the modules.

    Every knob is documented where it is consumed; ratios are relative to a
    problem scale unless the name says otherwise.
    """

    block_det_rel: float = 1e-10  # Gram block nondegeneracy: sigma_min > rel * sigma_max
    cluster_rel: float = 1e-8     # eigenvalue classification and clustering
    rank_rel: float = 1e-10       # singular-value cutoff for rank / null-space decisions
    integer_rel: float = 1e-9     # rational-multiple detection for lattice sums
    merge_rel: float = 1e-9       # merging numerically coincident conjugate times
    zero_rel: float = 1e-13       # "is this vector/operator zero" dispatch decisions
    fd_step: float = 1e-3         # finite-difference step for field residuals
    residual_tol: float = 1e-6    # acceptance threshold for Jacobi residuals
    quad_tol: float = 1e-10       # adaptive quadrature absolute tolerance
    bisect_tol: float = 1e-12     # bisection tolerance in t for root polish
    refine_tol: float = 1e-9      # golden-section refinement tolerance in t
    rank_tol: float = 1e-6        # oracle multiplicity threshold (relative to sigma_max)
    match_tol: float = 1e-5       # closed form vs oracle time matching (absolute)
    ortho_rel: float = 1e-8       # image-membership orthogonality and residual scale
    speed_eq_rel: float = 1e-9    # equality test <J x0, v> == <gdot, gdot>

    def replace(self, **kwargs: float) -> "Tolerances":
        return dataclasses.replace(self, **kwargs)

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


DEFAULT_TOL = Tolerances()
