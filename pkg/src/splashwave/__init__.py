"""Boundary-integral simulator for 2D periodic free-surface water waves.

Evolves the interface and its dynamic variable (boundary potential or
sheet strength) in either the physical strip or the conformally mapped
plane where self-touching interfaces open into embedded closed contours,
and computes the observables that track a run: arc-chord functional,
conserved energy, interface stability function, Sobolev energy and
blowup-rate fits.
"""

from .amplitude import (IntegralEquationSettings, apply_i_plus_j,
                        solve_omega_from_normal_velocity, solve_omega_from_phi,
                        solve_omega_t)
from .birkhoff_rott import VortexSheet, br_boundary, br_interior, br_time_explicit
from .curve import (ArcChordReport, InterfaceCurve, arc_chord, make_splash_family,
                    make_splat_curve, map_curve, resample_uniform_speed,
                    tangent_data, validate_splash_curve, validate_splat_curve)
from .diagnostics import (DiagnosticsRecord, PowerLawFit, blowup_observables,
                          compute_record, energy_es, fit_power_law,
                          rayleigh_taylor_sigma, sobolev_energy)
from .evolution import (RunResult, SheetState, StepperConfig, StopConditions,
                        b_of_t, phi_gauge, rhs_omega_formulation,
                        rhs_phi_formulation, rk4_step, run, tangential_c,
                        time_reverse)
from .spectral import Grid

__all__ = [
    "ArcChordReport", "DiagnosticsRecord", "Grid", "IntegralEquationSettings",
    "InterfaceCurve", "PowerLawFit", "RunResult", "SheetState", "StepperConfig",
    "StopConditions", "VortexSheet", "apply_i_plus_j", "arc_chord", "b_of_t",
    "blowup_observables", "br_boundary", "br_interior", "br_time_explicit",
    "compute_record", "energy_es", "fit_power_law", "make_splash_family",
    "make_splat_curve", "map_curve", "phi_gauge", "rayleigh_taylor_sigma",
    "resample_uniform_speed", "rhs_omega_formulation", "rhs_phi_formulation",
    "rk4_step", "run", "sobolev_energy", "solve_omega_from_normal_velocity",
    "solve_omega_from_phi", "solve_omega_t", "tangent_data", "tangential_c",
    "time_reverse", "validate_splash_curve", "validate_splat_curve",
]

__version__ = "0.1.0"
