"""Compressed modes and compressed plane waves on periodic 1D grids."""

from ._core import (
    BcpwSet,
    CmpwError,
    HamiltonianOp,
    ModeSet,
    PeriodicGrid,
    __version__,
    build_bcpw_set,
    closed_form_halfwidth,
    closed_form_lambda,
    cm_objective,
    cpw_forward,
    cpw_inverse,
    cumulative_band_profile,
    grid,
    max_shift_residual,
    operator_,
    orthonormal_projection,
    projected_spectrum,
    reference_eigenpairs,
    run_experiment_json,
    sample_closed_form_psi1,
    shrink,
    solve_cm,
    spectral_weight,
    topk_error,
    windowed_inverse,
)

__all__ = [
    "BcpwSet",
    "CmpwError",
    "HamiltonianOp",
    "ModeSet",
    "PeriodicGrid",
    "__version__",
    "build_bcpw_set",
    "closed_form_halfwidth",
    "closed_form_lambda",
    "cm_objective",
    "cpw_forward",
    "cpw_inverse",
    "cumulative_band_profile",
    "grid",
    "max_shift_residual",
    "operator_",
    "orthonormal_projection",
    "projected_spectrum",
    "reference_eigenpairs",
    "run_experiment_json",
    "sample_closed_form_psi1",
    "shrink",
    "solve_cm",
    "spectral_weight",
    "topk_error",
    "windowed_inverse",
]
