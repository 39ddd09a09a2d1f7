"""Numerical tolerances used across the package, collected in one record."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Default numerical tolerances for validation and structure checks.

    Every tolerance that gates an invariant check lives here so that the
    thresholds are documented in one place and can be tightened or relaxed
    consistently.
    """

    # Operator validity
    hermiticity: float = 1e-10          # max |M - M^dag| entry
    psd_min_eig: float = 1e-10          # allowed negative eigenvalue dip
    trace_upper_slack: float = 1e-10    # trace may exceed 1 by this much
    trace_lower_slack: float = 1e-8     # trace may dip below 0 by this much
    pure_norm: float = 1e-12            # |norm^2 - 1| for state vectors
    unitarity: float = 1e-10            # max |U^dag U - I| entry
    projector: float = 1e-10            # idempotence / orthogonality of projectors

    # Measurement
    povm_completeness: float = 1e-8     # sum of effects vs identity
    effect_negativity: float = 1e-10    # allowed negative eigenvalue of an effect
    prob_clip: float = 1e-10            # probabilities clipped into [0, 1]
    sample_negativity: float = 1e-12    # allowed negative entries when sampling

    # Entropic quantities
    entropy_eig_cutoff: float = 1e-12   # eigenvalues below this contribute 0
    entropy_trace: float = 1e-6         # required |trace - 1| for entropy input
    info_condition: float = 1e-6        # mutual-information / discord thresholds
    discord_ftol: float = 1e-6          # simplex refinement function tolerance

    # Objectivity structure checks
    block_diagonal: float = 1e-8        # off-diagonal system blocks
    conditional_orthogonality: float = 1e-8  # nuclear norm of rho_i rho_j
    conditional_purity: float = 1e-8    # non-leading eigenvalue mass
    conditional_skip: float = 1e-10     # probabilities below this are skipped

    # Protocol
    witness_bound_slack: float = 1e-9   # witness <= measure + slack
    mc_abort_window: int = 100_000      # attempts without success before abort


TOL = Tolerances()
