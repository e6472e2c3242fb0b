"""Bound states of three identical bosons in two dimensions.

Adiabatic hyperspherical treatment of the coordinate-space Faddeev
equations: two-body input physics, the angular eigenvalue problem with
its kinematic-rotation kernel, zero-range channel functions, coupled
radial equations, and parameter sweeps.  Natural units hbar = m = 1.
"""

from .errors import ConfigError, NumericalError
from .potentials import (
    PotentialSpec,
    evaluate,
    effective_range_scale,
    gaussian_pair,
    potential_from_config,
    tabulated,
    zero_range,
)
from .twobody import (
    EULER_GAMMA,
    TwoBodySolution,
    bound_states,
    scattering_length,
    solve_two_body,
    weak_binding_energy,
    zero_energy_solution,
)
from .angular import (
    AngularGrid,
    AngularSpectrum,
    hyperspherical_from_jacobi,
    kernel_average,
    rotated_angle,
    solve_angular,
)
from .zerorange import (
    NuBranch,
    efimov3d_lowest,
    efimov3d_nu,
    free_angular_solution,
    k0_channel_profile,
    lambda_zero_range,
    q11_asymptotic,
    q11_from_profile,
    solve_lambda_zero_range,
    zero_range_residual,
)
from .channels import (
    ChannelTable,
    ThreeBodyState,
    build_channel_table,
    count_zero_energy_nodes,
    effective_potential,
    rms_distance,
    rms_hyperradius,
    solve_bound_states,
)
from .sweeps import (
    borromean_scan,
    family_spec,
    fig2_sweep,
    no_third_state_report,
    tune_strength,
)

__version__ = "0.1.0"
__all__ = [
    "ConfigError",
    "NumericalError",
    "PotentialSpec",
    "zero_range",
    "gaussian_pair",
    "tabulated",
    "potential_from_config",
    "evaluate",
    "effective_range_scale",
    "EULER_GAMMA",
    "TwoBodySolution",
    "zero_energy_solution",
    "scattering_length",
    "bound_states",
    "weak_binding_energy",
    "solve_two_body",
    "AngularGrid",
    "AngularSpectrum",
    "hyperspherical_from_jacobi",
    "rotated_angle",
    "kernel_average",
    "solve_angular",
    "NuBranch",
    "zero_range_residual",
    "free_angular_solution",
    "solve_lambda_zero_range",
    "lambda_zero_range",
    "k0_channel_profile",
    "q11_asymptotic",
    "q11_from_profile",
    "efimov3d_lowest",
    "efimov3d_nu",
    "ChannelTable",
    "ThreeBodyState",
    "build_channel_table",
    "effective_potential",
    "solve_bound_states",
    "count_zero_energy_nodes",
    "rms_hyperradius",
    "rms_distance",
    "fig2_sweep",
    "borromean_scan",
    "no_third_state_report",
    "tune_strength",
    "family_spec",
]
