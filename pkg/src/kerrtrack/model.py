"""Two-mode mean-field model of driven atom-molecule condensate conversion.

Domain types and pure functions shared by the rest of the package: the
cubic (Kerr) elastic-scattering coefficients and the two combinations
through which they enter the population dynamics, the complex two-mode
amplitudes, the reduced drop-surface coordinates, transforms between the
representations, and the reduced energy function.

Conventions
-----------
* ``a1`` is the atomic amplitude and ``sqrt(2)*a2`` the molecular one, so
  the conserved norm is ``J = |a1|^2 + 2|a2|^2 = 1`` and the molecular
  population is ``P = 2|a2|^2``.
* The reduced coordinates are the bilinears

      Pi2 =  2 (a1^2 conj(a2) + conj(a1)^2 a2)
      Pi3 = -2i(a1^2 conj(a2) - conj(a1)^2 a2)

  which on ``J = 1`` satisfy ``Pi2^2 + Pi3^2 = 8 (1-P)^2 P``: a
  drop-shaped surface with a conical point at ``P = 1``.  The chart
  ``(P, alpha)`` with ``alpha = atan2(Pi3, Pi2)`` is regular only away
  from the two poles ``P = 0`` and ``P = 1``; everything that has to be
  evaluated near a pole works with ``(P, Pi2, Pi3)`` instead.
* Dynamics and energies are expressed in the dimensionless triple
  ``(omega_tilde, delta_tilde, lambda_s_tilde)``: the pulse envelope in
  units of its peak value ``Omega_0``, the detuning already shifted by
  ``lambda_a`` and divided by ``Omega_0``, and ``lambda_s / Omega_0``.
  Populations depend on the raw detuning and ``lambda_a`` only through
  the difference entering ``delta_tilde``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SQRT2 = math.sqrt(2.0)

#: Half-width of the guard band around P = 0 and P = 1 inside which the
#: polar angle alpha is treated as undefined.
POLE_GUARD = 1e-9

#: Measured elastic-scattering coefficients for a Rb-87 condensate, in
#: cm^3/s per unit density: (atom-atom, atom-molecule, molecule-molecule).
RB87_KERR_COEFFS_CM3_PER_S = (4.96e-11, -6.44e-11, 2.48e-11)

#: Typical Rb-87 condensate density, in cm^-3.
RB87_TYPICAL_DENSITY_PER_CM3 = 4.2e14


@dataclass(frozen=True)
class KerrParams:
    """Cubic scattering coefficients, in any consistent frequency unit.

    ``lambda11``, ``lambda12`` and ``lambda22`` are the atom-atom,
    atom-molecule and molecule-molecule coefficients (the two cross
    coefficients are equal by symmetry).  Populations feel them only
    through the two derived combinations:

        lambda_s = 2*lambda11 + lambda22/2 - 2*lambda12
        lambda_a = 2*lambda11 - lambda12

    ``lambda_a`` acts as a constant detuning shift while ``lambda_s``
    produces a nonlinear frequency pull proportional to the molecular
    population.
    """

    lambda11: float
    lambda12: float
    lambda22: float

    @property
    def lambda_s(self) -> float:
        return 2.0 * self.lambda11 + 0.5 * self.lambda22 - 2.0 * self.lambda12

    @property
    def lambda_a(self) -> float:
        return 2.0 * self.lambda11 - self.lambda12

    def rescaled(self, scale: float) -> "KerrParams":
        """Multiply every coefficient by ``scale`` (e.g. ``1/Omega_0``)."""
        return KerrParams(scale * self.lambda11, scale * self.lambda12,
                          scale * self.lambda22)

    @classmethod
    def from_combinations(cls, lambda_s: float, lambda_a: float = 0.0) -> "KerrParams":
        """Canonical raw triple realizing the given combinations.

        Any triple with the same (lambda_s, lambda_a) produces identical
        population dynamics; this one puts everything into lambda12 and
        lambda22.
        """
        return cls(0.0, -lambda_a, 2.0 * lambda_s - 4.0 * lambda_a)

    @classmethod
    def rb87(cls, rho_per_cm3: float = RB87_TYPICAL_DENSITY_PER_CM3) -> "KerrParams":
        """Rb-87 coefficients (in 1/s) at condensate density rho."""
        c11, c12, c22 = RB87_KERR_COEFFS_CM3_PER_S
        return cls(c11 * rho_per_cm3, c12 * rho_per_cm3, c22 * rho_per_cm3)


def derive_kerr_combinations(lambda11: float, lambda12: float, lambda22: float) -> KerrParams:
    """Bundle raw cubic coefficients; the combinations come out as properties."""
    return KerrParams(lambda11, lambda12, lambda22)


@dataclass(frozen=True)
class AmplitudeState:
    """Complex two-mode state; ``a2`` carries the sqrt(2) convention."""

    a1: complex
    a2: complex

    @property
    def j_norm(self) -> float:
        """Conserved norm J = |a1|^2 + 2|a2|^2 (unity for physical states)."""
        return abs(self.a1) ** 2 + 2.0 * abs(self.a2) ** 2

    @property
    def population(self) -> float:
        """Molecular population P = 2|a2|^2."""
        return 2.0 * abs(self.a2) ** 2


@dataclass(frozen=True)
class ReducedState:
    """Point of the reduced phase space in the globally regular coordinates."""

    P: float
    Pi2: float
    Pi3: float

    def __post_init__(self):
        if not -1e-9 <= self.P <= 1.0 + 1e-9:
            raise ValueError(f"population P={self.P} outside [0, 1]")

    @property
    def surface_residual(self) -> float:
        """Deviation from the drop-surface relation Pi2^2 + Pi3^2 = 8(1-P)^2 P."""
        return self.Pi2 ** 2 + self.Pi3 ** 2 - 8.0 * (1.0 - self.P) ** 2 * self.P


@dataclass(frozen=True)
class DimensionlessParams:
    """The two dimensionless knobs of a scenario plus the window half-width.

    ``lambda_s_tilde`` is lambda_s over the peak coupling Omega_0 and
    ``tau = Omega_0 * T`` sets the adiabaticity scale.  The integration
    window is ``s in [-window_ct*tau, +window_ct*tau]`` in the
    dimensionless time ``s = Omega_0 * t``.
    """

    lambda_s_tilde: float
    tau: float
    window_ct: float = 10.0

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.window_ct > 0:
            raise ValueError(f"window_ct must be positive, got {self.window_ct}")

    @property
    def window(self) -> tuple[float, float]:
        half = self.window_ct * self.tau
        return (-half, half)


def amplitude_to_reduced(state: AmplitudeState, j_tol: float = 1e-6) -> ReducedState:
    """Map a two-mode state to the drop-surface coordinates.

    Rejects states whose norm J strays from 1 by more than ``j_tol``,
    which signals a corrupted integration rather than a physical state.
    """
    j = state.j_norm
    if abs(j - 1.0) > j_tol:
        raise ValueError(f"norm J = {j!r} violates J = 1 beyond tolerance {j_tol}")
    cross = state.a1 * state.a1 * state.a2.conjugate()
    return ReducedState(P=state.population,
                        Pi2=4.0 * cross.real,
                        Pi3=4.0 * cross.imag)


def reduced_to_alpha(state: ReducedState, guard: float = POLE_GUARD) -> tuple[float, float]:
    """Read a reduced-space point in the (P, alpha) chart.

    The chart does not exist at the poles; populations inside the guard
    band around P = 0 or P = 1 are rejected.
    """
    if state.P < guard or state.P > 1.0 - guard:
        raise ValueError(
            f"alpha is undefined within {guard} of the poles (got P={state.P})")
    return state.P, math.atan2(state.Pi3, state.Pi2)


def alpha_to_reduced(P: float, alpha: float) -> ReducedState:
    """Inverse chart map; valid for any P in [0, 1] (alpha ignored at poles)."""
    r = 2.0 * SQRT2 * (1.0 - P) * math.sqrt(P)
    return ReducedState(P=P, Pi2=r * math.cos(alpha), Pi3=r * math.sin(alpha))


def reduced_to_amplitude(state: ReducedState) -> AmplitudeState:
    """Lift a reduced point back to amplitudes with the atomic phase fixed to 0."""
    alpha = math.atan2(state.Pi3, state.Pi2)
    a1 = math.sqrt(max(1.0 - state.P, 0.0))
    a2 = math.sqrt(max(state.P, 0.0) / 2.0) * complex(math.cos(alpha), -math.sin(alpha))
    return AmplitudeState(a1=complex(a1, 0.0), a2=a2)


def reduced_population_rate(P, alpha, omega_tilde):
    """dP/ds on the reduced phase space."""
    return omega_tilde * (1.0 - P) * math.sqrt(P) * math.sin(alpha)


def reduced_alpha_rate(P, alpha, omega_tilde, delta_tilde, lambda_s_tilde):
    """d(alpha)/ds on the reduced phase space; singular at P = 0."""
    return (delta_tilde + lambda_s_tilde * P
            + omega_tilde * (1.0 - 3.0 * P) * math.cos(alpha) / (2.0 * math.sqrt(P)))


def reduced_hamiltonian(P, alpha, omega_tilde, delta_tilde, lambda_s_tilde):
    """Dimensionless reduced energy, with the state-independent constant dropped.

    h = delta_tilde*P/2 + lambda_s_tilde*P^2/4
        + (omega_tilde/2) (1-P) sqrt(P) cos(alpha)

    Because the dropped constant depends on the instantaneous detuning,
    energies are only comparable within one frozen parameter snapshot.
    """
    return (0.5 * delta_tilde * P + 0.25 * lambda_s_tilde * P * P
            + 0.5 * omega_tilde * (1.0 - P) * math.sqrt(P) * math.cos(alpha))


def reduced_hamiltonian_from_pi(P, Pi2, omega_tilde, delta_tilde, lambda_s_tilde):
    """Same energy evaluated from the regular coordinates; array friendly."""
    return (omega_tilde * Pi2 / (4.0 * SQRT2)
            + 0.5 * delta_tilde * P + 0.25 * lambda_s_tilde * P * P)


def amplitude_hamiltonian(state: AmplitudeState, omega_tilde: float,
                          delta_full_tilde: float, kerr: KerrParams) -> float:
    """Energy of the full two-mode model (includes its additive constant).

    ``delta_full_tilde`` is the raw detuning over Omega_0, i.e. not yet
    shifted by lambda_a.  Related to the reduced energy by
    ``reduced = amplitude + hamiltonian_offset(...)`` on J = 1 states.
    """
    n1 = abs(state.a1) ** 2
    n2 = abs(state.a2) ** 2
    cross = (state.a1 * state.a1 * state.a2.conjugate()).real
    return (delta_full_tilde / 3.0 * (n2 - n1)
            + omega_tilde * cross / SQRT2
            + 0.5 * kerr.lambda11 * n1 * n1
            + 0.5 * kerr.lambda22 * n2 * n2
            + kerr.lambda12 * n1 * n2)


def hamiltonian_offset(delta_full_tilde: float, kerr: KerrParams, j: float = 1.0) -> float:
    """Constant separating the amplitude energy from the reduced one."""
    return delta_full_tilde / 3.0 * j - 0.5 * kerr.lambda11 * j * j
