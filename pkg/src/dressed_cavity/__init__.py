"""Finite-temperature dynamics of a dressed harmonic atom in a spherical cavity."""

__version__ = "0.1.0"

from .coupling import (  # noqa: E402
    CouplingMatrix,
    approx_elements,
    exact_elements,
    finite_n_oracle,
    t0r_exact,
    tkr_exact,
)
from .dynamics import (  # noqa: E402
    EvolutionSeries,
    StabilityReport,
    bose_occupation,
    default_time_grid,
    f00_sq_small_cavity,
    f_munu,
    free_space_asymptote,
    occupation_evolution,
    occupation_lower_bound,
    stability_bound,
    stability_report,
    time_average,
)
from .spectrum import (  # noqa: E402
    ModeSpectrum,
    RegimeReport,
    epsilon_k_linearized,
    field_mode_frequencies,
    omega0_small_cavity,
    series_identity_check,
    solve_epsilon_exact,
    solve_spectrum,
    solve_spectrum_exact,
    validate_regime,
)
from .units import CavityScenario, PhysicalConstants, build_scenario, thermal_exponent  # noqa: E402
