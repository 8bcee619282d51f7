"""Adiabatic tracking of driven atom-molecule condensate conversion with
Kerr nonlinearities: detuning design, dynamics in two representations,
instantaneous phase portraits and bifurcation scans."""

__version__ = "0.1.0"

from .model import (AmplitudeState, DimensionlessParams, KerrParams,
                    ReducedState, alpha_to_reduced, amplitude_hamiltonian,
                    amplitude_to_reduced, derive_kerr_combinations,
                    hamiltonian_offset, reduced_hamiltonian,
                    reduced_hamiltonian_from_pi, reduced_to_alpha,
                    reduced_to_amplitude)
from .tracking import (TrackingDomainError, TrackingScenario, canonical_target,
                       design_detuning, sech_pulse, zero_pulse)
from .dynamics import (IntegrationError, IntegratorConfig, Trajectory,
                       integrate_amplitudes, integrate_reduced,
                       verify_tanh_identity)
from .phase_portrait import (CrossingReport, CrossingScan, FixedPoint,
                             PortraitSnapshot, ScanResolutionError,
                             SeparatrixCurve, classify_stability,
                             fixed_points_at, portrait_at, scan_crossings,
                             trace_separatrix)

__all__ = [
    "AmplitudeState", "DimensionlessParams", "KerrParams", "ReducedState",
    "alpha_to_reduced", "amplitude_hamiltonian", "amplitude_to_reduced",
    "derive_kerr_combinations", "hamiltonian_offset", "reduced_hamiltonian",
    "reduced_hamiltonian_from_pi", "reduced_to_alpha", "reduced_to_amplitude",
    "TrackingDomainError", "TrackingScenario", "canonical_target",
    "design_detuning", "sech_pulse", "zero_pulse",
    "IntegrationError", "IntegratorConfig", "Trajectory",
    "integrate_amplitudes", "integrate_reduced", "verify_tanh_identity",
    "CrossingReport", "CrossingScan", "FixedPoint", "PortraitSnapshot",
    "ScanResolutionError", "SeparatrixCurve", "classify_stability",
    "fixed_points_at", "portrait_at", "scan_crossings", "trace_separatrix",
]
