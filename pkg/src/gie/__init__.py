"""Gravity-induced entanglement between two pulsed optomechanical systems.

Gaussian and Fock-state inputs are propagated through the gravitational
beam-splitter channel with mechanical thermal noise and readout loss; the
package computes entanglement negativities, evaluates the analytic
separability bounds, and regenerates the reference figure data via
deterministic parameter sweeps with a CSV contract.
"""

from .bounds import (
    BoundReport,
    DimensionlessPoint,
    OmegaComponents,
    PhysicalParams,
    bound_report,
    ea_eb_conditions,
    finite_squeezing_condition,
    lossy_bound_margin,
    omega_components,
    optimal_squeezing,
    physical_to_dimensionless,
    sample_separable_covariance,
    separability_preserved,
    universal_threshold_margin,
    witness_squeezing,
)
from .errors import NumericalConsistencyError, TruncationError
from .fock import (
    FockDensityMatrix,
    log_factorials,
    min_ppt_eigenvalue,
    partial_transpose,
    ppt_negativity,
    pure_fock_negativity,
    pure_output_density,
    thermal_output_density,
)
from .gaussian import (
    ChannelParams,
    GravityChannel,
    apply_loss,
    closed_form_negativity_squeezed,
    closed_form_nu_squeezed,
    evolve,
    gaussian_negativity,
    gravity_channel,
    input_squeezed_pair,
    input_tmsv,
    is_physical,
    ppt_min_symplectic_eigenvalue,
    swap_coefficients,
)
from .sweeps import Axis, BoundaryTraceSpec, SweepSpec, Table, emit_csv, run_sweep, trace_boundary

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "BoundReport",
    "BoundaryTraceSpec",
    "ChannelParams",
    "DimensionlessPoint",
    "FockDensityMatrix",
    "GravityChannel",
    "NumericalConsistencyError",
    "OmegaComponents",
    "PhysicalParams",
    "SweepSpec",
    "Table",
    "TruncationError",
    "apply_loss",
    "bound_report",
    "closed_form_negativity_squeezed",
    "closed_form_nu_squeezed",
    "ea_eb_conditions",
    "emit_csv",
    "evolve",
    "finite_squeezing_condition",
    "gaussian_negativity",
    "gravity_channel",
    "input_squeezed_pair",
    "input_tmsv",
    "is_physical",
    "log_factorials",
    "lossy_bound_margin",
    "min_ppt_eigenvalue",
    "omega_components",
    "optimal_squeezing",
    "partial_transpose",
    "physical_to_dimensionless",
    "ppt_min_symplectic_eigenvalue",
    "ppt_negativity",
    "pure_fock_negativity",
    "pure_output_density",
    "run_sweep",
    "sample_separable_covariance",
    "separability_preserved",
    "swap_coefficients",
    "thermal_output_density",
    "trace_boundary",
    "universal_threshold_margin",
    "witness_squeezing",
]
