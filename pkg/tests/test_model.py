import cmath
import math

import numpy as np
import pytest

from kerrtrack import (AmplitudeState, DimensionlessParams, KerrParams,
                       ReducedState, alpha_to_reduced, amplitude_hamiltonian,
                       amplitude_to_reduced, derive_kerr_combinations,
                       hamiltonian_offset, reduced_hamiltonian,
                       reduced_to_alpha, reduced_to_amplitude)
from kerrtrack.model import RB87_TYPICAL_DENSITY_PER_CM3

RHO = RB87_TYPICAL_DENSITY_PER_CM3


class TestKerrCombinations:
    def test_rb87_values(self):
        k = derive_kerr_combinations(4.96e-11 * RHO, -6.44e-11 * RHO,
                                     2.48e-11 * RHO)
        # published combinations quoted to three significant figures
        assert k.lambda_s == pytest.approx(2.40e-10 * RHO, rel=5e-3)
        assert k.lambda_a == pytest.approx(1.64e-10 * RHO, rel=5e-3)

    def test_kerr_free_limit(self):
        k = derive_kerr_combinations(0.0, 0.0, 0.0)
        assert k.lambda_s == 0.0 and k.lambda_a == 0.0

    def test_direct_arithmetic(self):
        k = derive_kerr_combinations(1.0, 1.0, 2.0)
        assert k.lambda_s == pytest.approx(1.0, abs=1e-15)
        assert k.lambda_a == pytest.approx(1.0, abs=1e-15)

    def test_linearity_superposition(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            x = rng.uniform(-1, 1, 3)
            y = rng.uniform(-1, 1, 3)
            a, b = rng.uniform(-2, 2, 2)
            kx = derive_kerr_combinations(*x)
            ky = derive_kerr_combinations(*y)
            kz = derive_kerr_combinations(*(a * x + b * y))
            assert kz.lambda_s == pytest.approx(a * kx.lambda_s + b * ky.lambda_s,
                                                rel=1e-12, abs=1e-13)
            assert kz.lambda_a == pytest.approx(a * kx.lambda_a + b * ky.lambda_a,
                                                rel=1e-12, abs=1e-13)

    def test_from_combinations_roundtrip(self):
        k = KerrParams.from_combinations(1.7, -0.4)
        assert k.lambda_s == pytest.approx(1.7, abs=1e-15)
        assert k.lambda_a == pytest.approx(-0.4, abs=1e-15)

    def test_rescaled(self):
        k = KerrParams(2.0, -1.0, 4.0).rescaled(0.5)
        assert (k.lambda11, k.lambda12, k.lambda22) == (1.0, -0.5, 2.0)


class TestAmplitudeToReduced:
    def test_all_atomic_pole(self):
        r = amplitude_to_reduced(AmplitudeState(1.0 + 0j, 0j))
        assert (r.P, r.Pi2, r.Pi3) == (0.0, 0.0, 0.0)

    def test_all_molecular_pole(self):
        r = amplitude_to_reduced(AmplitudeState(0j, 1 / math.sqrt(2) + 0j))
        assert r.P == pytest.approx(1.0, abs=1e-15)
        assert r.Pi2 == 0.0 and r.Pi3 == 0.0

    def test_equatorial_real_state(self):
        r = amplitude_to_reduced(AmplitudeState(1 / math.sqrt(2) + 0j, 0.5 + 0j))
        assert r.P == pytest.approx(0.5, abs=1e-15)
        assert r.Pi2 == pytest.approx(1.0, abs=1e-15)
        assert r.Pi3 == pytest.approx(0.0, abs=1e-15)
        # consistency with the surface relation at these values
        assert 8 * (1 - r.P) ** 2 * r.P == pytest.approx(1.0, abs=1e-15)

    def test_rejects_norm_violation(self):
        with pytest.raises(ValueError, match="J"):
            amplitude_to_reduced(AmplitudeState(1.0 + 0j, 1.0 + 0j))

    def test_surface_invariant_random_states(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            p1 = rng.uniform(0, 1)
            ph1, ph2 = rng.uniform(-math.pi, math.pi, 2)
            a1 = math.sqrt(p1) * cmath.exp(1j * ph1)
            a2 = math.sqrt((1 - p1) / 2) * cmath.exp(1j * ph2)
            r = amplitude_to_reduced(AmplitudeState(a1, a2))
            assert abs(r.surface_residual) <= 1e-10


class TestAngleChart:
    def test_positive_axis(self):
        P, alpha = reduced_to_alpha(ReducedState(0.5, 1.0, 0.0))
        assert (P, alpha) == (0.5, 0.0)

    def test_negative_axis(self):
        _, alpha = reduced_to_alpha(ReducedState(0.5, -1.0, 0.0))
        assert alpha == pytest.approx(math.pi)

    def test_quarter_turn(self):
        # all of the surface radius in Pi3 at P = 1/4
        pi3 = math.sqrt(8 * (3 / 4) ** 2 * (1 / 4))
        _, alpha = reduced_to_alpha(ReducedState(0.25, 0.0, pi3))
        assert alpha == pytest.approx(math.pi / 2, abs=1e-15)

    @pytest.mark.parametrize("P", [1e-10, 1 - 1e-10, 0.0, 1.0])
    def test_guard_band_rejected(self, P):
        state = alpha_to_reduced(P, 0.3)
        with pytest.raises(ValueError, match="undefined"):
            reduced_to_alpha(state)

    def test_roundtrip_reconstruction(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            P = rng.uniform(0.01, 0.99)
            alpha = rng.uniform(-math.pi, math.pi)
            state = alpha_to_reduced(P, alpha)
            P2, alpha2 = reduced_to_alpha(state)
            back = alpha_to_reduced(P2, alpha2)
            assert abs(back.Pi2 - state.Pi2) <= 1e-12
            assert abs(back.Pi3 - state.Pi3) <= 1e-12


class TestReducedHamiltonian:
    def test_vanishes_at_atomic_pole(self):
        for alpha in (0.0, 1.0, math.pi):
            assert reduced_hamiltonian(0.0, alpha, 1.3, -0.7, 2.0) == 0.0

    def test_molecular_pole_value(self):
        # coupling term vanishes at P = 1; h = delta/2 + lam/4
        assert reduced_hamiltonian(1.0, 0.77, 1.0, 1.0, 2.0) == pytest.approx(1.0)

    def test_equator_coupling_term(self):
        h = reduced_hamiltonian(0.5, 0.0, 1.0, 0.0, 0.0)
        assert h == pytest.approx(0.25 * math.sqrt(0.5), abs=1e-15)  # 0.17678

    def test_matches_amplitude_hamiltonian(self):
        # chart energy equals the full two-mode energy plus its constant
        rng = np.random.default_rng(5)
        for _ in range(100):
            P = rng.uniform(1e-3, 0.999)
            alpha = rng.uniform(-math.pi, math.pi)
            om = rng.uniform(0, 2)
            dl = rng.uniform(-3, 3)
            kerr = KerrParams(*rng.uniform(-2, 2, 3))
            dl_full = dl + kerr.lambda_a
            state = reduced_to_amplitude(alpha_to_reduced(P, alpha))
            h_amp = amplitude_hamiltonian(state, om, dl_full, kerr)
            h_red = reduced_hamiltonian(P, alpha, om, dl, kerr.lambda_s)
            assert h_red == pytest.approx(
                h_amp + hamiltonian_offset(dl_full, kerr), abs=1e-10)


class TestDimensionlessParams:
    def test_window(self):
        p = DimensionlessParams(1.0, tau=4.0, window_ct=10.0)
        assert p.window == (-40.0, 40.0)

    @pytest.mark.parametrize("kwargs", [dict(tau=0.0), dict(tau=-1.0),
                                        dict(tau=1.0, window_ct=0.0)])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            DimensionlessParams(0.0, **kwargs)
