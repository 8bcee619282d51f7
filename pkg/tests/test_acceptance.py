"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see every line; the
verdicts also appear in captured output on failure.  Scenario runs are
memoized, so the suite costs a few minutes end to end.
"""

import math

import numpy as np
import pytest

from kerrtrack import (AmplitudeState, FixedPoint, KerrParams, ReducedState,
                       classify_stability, derive_kerr_combinations,
                       fixed_points_at, integrate_amplitudes, integrate_reduced,
                       reduced_hamiltonian_from_pi, reduced_to_amplitude,
                       scan_crossings, verify_tanh_identity)
from kerrtrack.dynamics import IntegratorConfig
from kerrtrack.model import RB87_TYPICAL_DENSITY_PER_CM3
from kerrtrack.phase_portrait import (DEGENERATE, ELLIPTIC, HYPERBOLIC,
                                      POLE_ALL_MOLECULES,
                                      interior_determinant)

from _support import (brute_force_roots, make_scenario, random_kerr_triple,
                      random_profiles, random_surface_state, run_tracked)


def criterion(name, ok, detail=""):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"{name}: {detail}"


FIDELITY_LAMBDAS = (0.0, 0.5, 1.0, 2.0, 5.0)


def final_P(tau, lam, branch, compensate=True):
    return run_tracked(tau, lam, branch, compensate,
                       representation="amplitude").final_P


def test_c1_fidelity_threshold():
    # branch alphaPi, compensation on, sech pulse, canonical target, tau = 5:
    # final P >= 0.99 across the Kerr strengths
    values = {lam: final_P(5.0, lam, "alphaPi") for lam in FIDELITY_LAMBDAS}
    detail = "  ".join(f"lam={lam}: P={p:.5f}" for lam, p in values.items())
    criterion("C1 fidelity-threshold (tau=5, final P >= 0.99)",
              all(p >= 0.99 for p in values.values()), detail)


def test_c2_missing_compensation_infidelity():
    # branch alphaPi, compensation off, lambda_s = omega0/2: infidelity
    # within [0.05, 0.15] for tau in {5, 8}
    values = {tau: 1.0 - final_P(tau, 0.5, "alphaPi", compensate=False)
              for tau in (5.0, 8.0)}
    detail = "  ".join(f"tau={tau}: infid={v:.4f}" for tau, v in values.items())
    criterion("C2 missing-compensation infidelity in [0.05, 0.15]",
              all(0.05 <= v <= 0.15 for v in values.values()), detail)


def test_c2_paper_value_uncompensated_alpha0():
    # supplementary, not a spec criterion: the published ten-percent
    # degradation at lambda_s = omega0/2 is realized by the alpha0 design
    values = {tau: 1.0 - final_P(tau, 0.5, "alpha0", compensate=False)
              for tau in (5.0, 8.0)}
    detail = "  ".join(f"tau={tau}: infid={v:.4f}" for tau, v in values.items())
    print(f"\nNOTE uncompensated-alpha0 reference: {detail}")
    assert all(0.05 <= v <= 0.15 for v in values.values()), detail


def test_c3_strong_kerr_compensation():
    # branch alphaPi, compensation on, lambda_s = 2 omega0, tau >= 5:
    # infidelity <= 0.01
    values = {tau: 1.0 - final_P(tau, 2.0, "alphaPi") for tau in (5.0, 6.0, 8.0)}
    detail = "  ".join(f"tau={tau}: infid={v:.5f}" for tau, v in values.items())
    criterion("C3 strong-Kerr compensation (infidelity <= 0.01 for tau >= 5)",
              all(v <= 0.01 for v in values.values()), detail)


def test_c4_branch_asymmetry():
    # at omega0/lambda_s = 0.5, tau = 5: exactly one elliptic->hyperbolic
    # crossing on alpha0 with degraded fidelity; zero crossings on alphaPi
    scan0 = scan_crossings(make_scenario(5.0, 2.0, "alpha0"))
    scan_pi = scan_crossings(make_scenario(5.0, 2.0, "alphaPi"))
    tracked0 = scan0.tracked_crossings
    one_exchange = (len(tracked0) == 1
                    and tracked0[0].tracked_stability_before == ELLIPTIC
                    and tracked0[0].tracked_stability_after == HYPERBOLIC)
    p0 = final_P(5.0, 2.0, "alpha0")
    ppi = final_P(5.0, 2.0, "alphaPi")
    ok = (one_exchange and len(scan_pi.tracked_crossings) == 0 and p0 < ppi)
    criterion("C4 branch-asymmetry (one alpha0 crossing, zero alphaPi, "
              "degraded fidelity)", ok,
              f"alpha0 crossings={len(tracked0)} "
              f"alphaPi crossings={len(scan_pi.tracked_crossings)} "
              f"P(alpha0)={p0:.5f} P(alphaPi)={ppi:.5f}")


def test_c5_large_field_recovery():
    # omega0/lambda_s = 1.1, tau = 5.5: the crossing sits within 0.15 of
    # P = 1 and the final fidelity beats the omega0/lambda_s = 0.5 case
    scan = scan_crossings(make_scenario(5.5, 1 / 1.1, "alpha0"))
    tracked = scan.tracked_crossings
    assert len(tracked) == 1
    p_cross = tracked[0].P
    p_final = final_P(5.5, 1 / 1.1, "alpha0")
    p_small_field = final_P(5.0, 2.0, "alpha0")
    near_pole = abs(1.0 - p_cross) <= 0.15
    recovers = p_final > p_small_field
    criterion("C5 large-field recovery (crossing P within 0.15 of 1, "
              "fidelity recovered)", near_pole and recovers,
              f"P_cross={p_cross:.5f} (|1-P|={abs(1 - p_cross):.4f}) "
              f"final={p_final:.5f} vs small-field {p_small_field:.5f} "
              f"[near-pole clause: {'PASS' if near_pole else 'FAIL'}, "
              f"recovery clause: {'PASS' if recovers else 'FAIL'}]")


def test_c6_transfer_bound():
    # every pole-started run obeys the exact transfer identity to 1e-3 and
    # ends strictly short of complete conversion
    cases = [(5.0, lam, "alphaPi", True) for lam in FIDELITY_LAMBDAS]
    cases += [(5.0, 2.0, "alpha0", True), (5.5, 1 / 1.1, "alpha0", True),
              (6.0, 5.0, "alphaPi", True), (9.0, 1 / 1.1, "alphaPi", True),
              (5.0, 0.5, "alphaPi", False), (8.0, 0.5, "alphaPi", False)]
    worst_dev, min_gap = 0.0, math.inf
    for tau, lam, branch, comp in cases:
        traj = run_tracked(tau, lam, branch, comp)
        dev = verify_tanh_identity(traj, make_scenario(tau, lam, branch).pulse)
        worst_dev = max(worst_dev, dev)
        min_gap = min(min_gap, 1.0 - traj.final_P)
    criterion("C6 transfer-bound (tanh identity <= 1e-3, final P < 1)",
              worst_dev <= 1e-3 and min_gap > 0.0,
              f"max identity deviation={worst_dev:.2e}, "
              f"min (1 - final P)={min_gap:.2e}")


def test_c7_invariant_suite():
    rng = np.random.default_rng(2024)
    failures = []

    # --- norm and surface drift -------------------------------------------
    fig3_amp = run_tracked(6.0, 5.0, "alphaPi", representation="amplitude")
    fig3_red = run_tracked(6.0, 5.0, "alphaPi")
    j_worst = fig3_amp.max_j_drift
    surf_worst = max(fig3_amp.max_surface_drift, fig3_red.max_surface_drift)
    for _ in range(3):
        pulse, delta, window = random_profiles(rng)
        lam = rng.uniform(0, 3)
        kerr = random_kerr_triple(rng, lam)
        amp = integrate_amplitudes(
            reduced_to_amplitude(random_surface_state(rng)), pulse,
            lambda s: delta(s) + kerr.lambda_a, kerr, window, n_samples=401)
        j_worst = max(j_worst, amp.max_j_drift)
        surf_worst = max(surf_worst, amp.max_surface_drift)
    if j_worst > 1e-8:
        failures.append(f"J drift {j_worst:.2e}")
    if surf_worst > 1e-8:
        failures.append(f"surface drift {surf_worst:.2e}")

    # --- frozen-parameter energy conservation over span 100 ----------------
    h_worst = 0.0
    for _ in range(5):
        om = rng.uniform(0.2, 2.0)
        dl = rng.uniform(-2.0, 2.0)
        lam = rng.uniform(0.0, 4.0)
        traj = integrate_reduced(random_surface_state(rng), lambda s: om,
                                 lambda s: dl, lam, (0.0, 100.0))
        h = reduced_hamiltonian_from_pi(traj.P, traj.Pi2, om, dl, lam)
        h_worst = max(h_worst, float(np.max(np.abs(h - h[0]))))
    if h_worst > 1e-8:
        failures.append(f"energy drift {h_worst:.2e}")

    # --- cross-representation agreement on 50 random scenarios -------------
    eq_worst = 0.0
    for k in range(50):
        pulse, delta, window = random_profiles(rng)
        lam = rng.uniform(0.0, 3.0)
        kerr = random_kerr_triple(rng, lam)
        start = (ReducedState(0.0, 0.0, 0.0) if k % 2 == 0
                 else random_surface_state(rng))
        red = integrate_reduced(start, pulse, delta, lam, window,
                                n_samples=301)
        amp = integrate_amplitudes(
            reduced_to_amplitude(start), pulse,
            lambda s: delta(s) + kerr.lambda_a, kerr, window, n_samples=301)
        eq_worst = max(eq_worst, float(np.max(np.abs(red.P - amp.P))))
    if eq_worst > 1e-6:
        failures.append(f"representation disagreement {eq_worst:.2e}")

    # --- cubic roots against the scan oracle on 500 triples ----------------
    root_bad = 0
    for _ in range(500):
        om = rng.uniform(0.01, 10.0)
        dl = rng.uniform(-10.0, 10.0)
        lam = rng.uniform(0.0, 10.0)
        pts = fixed_points_at(om, dl, lam)
        for branch in ("alpha0", "alphaPi"):
            expected = [x for x in brute_force_roots(branch, om, dl, lam)
                        if 1e-9 < x < 1 - 1e-9]
            got = sorted(math.sqrt(fp.P) for fp in pts if fp.branch == branch)
            if len(got) != len(expected) or not np.allclose(got, expected,
                                                            atol=1e-8):
                root_bad += 1
    if root_bad:
        failures.append(f"{root_bad} cubic-root oracle mismatches")

    # --- stability classification against the trajectory oracle ------------
    stab_bad, n_interior = 0, 0
    while n_interior < 90:
        om = rng.uniform(0.1, 3.0)
        dl = rng.uniform(-4.0, 4.0)
        lam = rng.uniform(0.0, 5.0)
        for fp in fixed_points_at(om, dl, lam):
            if fp.branch not in ("alpha0", "alphaPi") or n_interior >= 90:
                continue
            det = interior_determinant(fp.P, fp.branch, om, dl, lam)
            if abs(det) < 5e-3 or not 0.02 < fp.P < 0.95:
                continue
            n_interior += 1
            if _orbit_class(fp, om, dl, lam, det) != fp.stability:
                stab_bad += 1
    pole_cases = [(1.0, -1.7, 2.0), (1.0, -2.0, 2.0), (1.0, -2.3, 2.0),
                  (0.8, -0.3, 0.5), (1.0, 1.0, 1.0), (0.5, -0.2, 0.4),
                  (2.0, -2.0, 1.0), (1.5, 0.5, 0.8), (1.0, -0.5, 0.2),
                  (0.7, -1.5, 2.4)]
    for om, dl, lam in pole_cases:
        fp = FixedPoint(1.0, POLE_ALL_MOLECULES, "", 0.0)
        predicted = classify_stability(fp, om, dl, lam)
        assert predicted != DEGENERATE  # a finite orbit cannot resolve those
        if _pole_orbit_class(om, dl, lam) != predicted:
            stab_bad += 1
    if stab_bad:
        failures.append(f"{stab_bad} stability-oracle mismatches")

    # --- lambda_a shift equivalence on 20 random triples -------------------
    shift_worst = 0.0
    tight = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    for _ in range(20):
        pulse, delta, window = random_profiles(rng)
        lam = rng.uniform(0.0, 2.0)
        pair = (random_kerr_triple(rng, lam), random_kerr_triple(rng, lam))
        runs = []
        for kerr in pair:
            runs.append(integrate_amplitudes(
                AmplitudeState(1.0 + 0j, 0j), pulse,
                lambda s, la=kerr.lambda_a: delta(s) + la, kerr, window,
                tight, n_samples=301))
        shift_worst = max(shift_worst,
                          float(np.max(np.abs(runs[0].P - runs[1].P))))
    if shift_worst > 1e-8:
        failures.append(f"lambda_a shift disagreement {shift_worst:.2e}")

    criterion("C7 invariant-suite", not failures,
              "; ".join(failures) if failures else
              f"J<=1e-8 ({j_worst:.1e}), surface<=1e-8 ({surf_worst:.1e}), "
              f"energy<=1e-8 ({h_worst:.1e}), cross-rep<=1e-6 ({eq_worst:.1e}), "
              f"roots 500/500, stability 100/100, "
              f"shift<=1e-8 ({shift_worst:.1e})")


def _orbit_class(fp, om, dl, lam, det, eps=1e-6):
    from kerrtrack import alpha_to_reduced
    start = alpha_to_reduced(fp.P + eps, fp.alpha)
    if det < 0:
        span = min(160.0, math.log(2000.0) / math.sqrt(-det) + 2.0)
    else:
        span = min(150.0, 12.0 * math.pi / math.sqrt(det))
    traj = integrate_reduced(start, lambda s: om, lambda s: dl, lam, (0, span),
                             n_samples=1201)
    dev = np.abs(traj.P - fp.P)
    return ELLIPTIC if dev.max() < 100 * eps else HYPERBOLIC


def _pole_orbit_class(om, dl, lam, eps=1e-6):
    kerr = KerrParams.from_combinations(lam, 0.0)
    initial = AmplitudeState(eps + 0j, math.sqrt((1 - eps ** 2) / 2) + 0j)
    disc = om * om - (dl + lam) ** 2
    span = min(80.0, math.log(2000.0) / (math.sqrt(abs(disc)) / 2) + 2.0)
    traj = integrate_amplitudes(initial, lambda s: om, lambda s: dl, kerr,
                                (0, span), n_samples=1201)
    return ELLIPTIC if np.abs(traj.c1).max() < 100 * eps else HYPERBOLIC


def test_c8_rb87_constants():
    rho = RB87_TYPICAL_DENSITY_PER_CM3
    k = derive_kerr_combinations(4.96e-11 * rho, -6.44e-11 * rho,
                                 2.48e-11 * rho)
    ok = (abs(k.lambda_s / (2.40e-10 * rho) - 1.0) <= 5e-3
          and abs(k.lambda_a / (1.64e-10 * rho) - 1.0) <= 5e-3)
    criterion("C8 Rb-87 constants (3 significant figures)", ok,
              f"lambda_s={k.lambda_s:.4e} /s vs 2.40e-10*rho, "
              f"lambda_a={k.lambda_a:.4e} /s vs 1.64e-10*rho")
