"""Pulse shapes, target population profiles and tracking detuning design.

The tracking construction takes a pulse envelope ``omega_tilde(s)`` and a
desired monotone population history ``P_track(s)`` and returns the
detuning profile that makes ``P_track`` an instantaneous fixed point of
the reduced flow at every time, on either the ``alpha = 0`` or the
``alpha = pi`` side of the phase space:

    delta_track(s) = -lambda_s_tilde * P
                     -/+ omega_tilde * (1 - 3P) / (2 sqrt(P))

with the upper sign for the ``alpha0`` branch and the lower sign for
``alphaPi``.  With ``compensate_kerr`` switched off the first term is
omitted from the design (the nonlinearity stays active in the dynamics),
which is the controlled way to measure what ignoring the Kerr pull costs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .model import POLE_GUARD, DimensionlessParams

BRANCH_ALPHA0 = "alpha0"
BRANCH_ALPHA_PI = "alphaPi"
BRANCHES = (BRANCH_ALPHA0, BRANCH_ALPHA_PI)

Profile = Callable[[float], float]


class TrackingDomainError(ValueError):
    """Raised when the target hits an exact pole where no design exists."""


def sech_pulse(tau: float) -> Profile:
    """Envelope sech(s/tau), normalized to peak value 1."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")

    def pulse(s: float) -> float:
        return 1.0 / math.cosh(s / tau)

    return pulse


def zero_pulse() -> Profile:
    """Coupling switched off entirely; diagnostic scenarios only."""
    return lambda s: 0.0


def canonical_target(tau: float) -> Profile:
    """Target population rising from 0 to 1 on the pulse's own time scale.

    P_track(s) = sin^2[arctan(sinh(s/tau))/2 + pi/4], evaluated through
    the equivalent closed form (1 + tanh(s/tau)) / 2.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")

    def target(s: float) -> float:
        return 0.5 * (1.0 + math.tanh(s / tau))

    return target


@dataclass(frozen=True)
class TrackingScenario:
    """A complete tracking setup in dimensionless form.

    ``pulse`` maps s to omega_tilde >= 0 and ``target`` maps s to the
    desired population in (0, 1) over the window interior, nondecreasing
    for the canonical transfer profile.
    """

    pulse: Profile
    target: Profile
    branch: str
    params: DimensionlessParams
    compensate_kerr: bool = True

    def __post_init__(self):
        if self.branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}, got {self.branch!r}")

    @property
    def window(self) -> tuple[float, float]:
        return self.params.window


def _branch_sign(branch: str) -> float:
    # sign of the omega/(2 sqrt(P)) term in the designed detuning
    return -1.0 if branch == BRANCH_ALPHA0 else 1.0


def design_detuning(scenario: TrackingScenario, guard: float = POLE_GUARD) -> Profile:
    """Detuning profile delta_tilde_track(s) for the scenario's branch.

    The quotient omega_tilde / (2 sqrt(P_track)) is a 0/0 form with a
    finite limit at the truncated window's left edge for pulse/target
    pairs that decay together; where the target sits inside the pole
    guard band the quotient is held at its value at the guard crossing
    instead of being evaluated directly.  A target that reaches an exact
    pole anywhere it cannot be frozen raises TrackingDomainError.
    """
    pulse, target = scenario.pulse, scenario.target
    lam = scenario.params.lambda_s_tilde
    sign = _branch_sign(scenario.branch)
    compensate = scenario.compensate_kerr
    lo, hi = scenario.window
    frozen: list[float] = []  # lazily computed left-edge quotient value

    def quotient(s: float) -> float:
        p = target(s)
        return sign * pulse(s) * (1.0 - 3.0 * p) / (2.0 * math.sqrt(p))

    def frozen_quotient() -> float:
        if not frozen:
            # locate where the (nondecreasing) target clears the guard band
            a, b = lo, hi
            if target(b) < guard:
                raise TrackingDomainError(
                    "target never clears the pole guard band inside the window")
            if target(a) >= guard:
                frozen.append(quotient(a))
            else:
                for _ in range(200):
                    m = 0.5 * (a + b)
                    if target(m) < guard:
                        a = m
                    else:
                        b = m
                frozen.append(quotient(b))
        return frozen[0]

    def delta(s: float) -> float:
        p = target(s)
        if p >= 1.0:
            raise TrackingDomainError(
                f"target reaches the all-molecular pole (P={p}) at s={s}")
        if p < guard:
            q = frozen_quotient()
        else:
            q = quotient(s)
        return q - lam * p if compensate else q

    return delta
