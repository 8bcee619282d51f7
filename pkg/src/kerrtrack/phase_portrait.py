"""Instantaneous fixed points, separatrices and bifurcation scans.

For frozen parameters (omega_tilde, delta_tilde, lambda_s_tilde) the
interior equilibria of the reduced flow sit on the two meridians
alpha = 0 and alpha = pi, with populations solving a cubic in
x = sqrt(P):

    alpha = 0 :  lam x^3 - (3 om / 2) x^2 + delta x + om/2 = 0
    alpha = pi:  lam x^3 + (3 om / 2) x^2 + delta x - om/2 = 0

The all-molecular cone point P = 1 is a fixed point for every parameter
value; the all-atomic pole P = 0 only when the coupling vanishes.
Interior stability follows from the sign of the determinant of the
(P, alpha) linearization; the cone point needs its own criterion,
obtained by linearizing the amplitude equations around the all-molecular
state: with mu = delta + lam it is elliptic for mu^2 > om^2 and
hyperbolic for mu^2 < om^2.

``scan_crossings`` follows the root families of a time-dependent
tracking scenario, localizes collisions of the tracked root with other
same-branch roots (stability exchanges), fold births and deaths of root
pairs, and stability flips of the cone point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import reduced_hamiltonian
from .tracking import (BRANCH_ALPHA0, BRANCH_ALPHA_PI, TrackingScenario,
                       design_detuning)

ELLIPTIC = "elliptic"
HYPERBOLIC = "hyperbolic"
DEGENERATE = "degenerate"

POLE_ALL_MOLECULES = "pole_P1"
POLE_ALL_ATOMS = "pole_P0"
INTERIOR_BRANCHES = (BRANCH_ALPHA0, BRANCH_ALPHA_PI)

#: |det| at or below this is reported as a degenerate (bifurcating) point.
DET_DEGENERATE_TOL = 1e-9

#: Roots are accepted as real below this imaginary part; conjugate pairs
#: up to the cluster tolerance are tested as ill-conditioned double roots.
IMAG_ACCEPT_TOL = 1e-9
IMAG_CLUSTER_TOL = 1e-6


class ScanResolutionError(RuntimeError):
    """Root matching across time samples became ambiguous."""


@dataclass(frozen=True)
class FixedPoint:
    """Instantaneous equilibrium of the reduced flow."""

    P: float
    branch: str
    stability: str
    energy: float

    @property
    def alpha(self) -> float:
        if self.branch == BRANCH_ALPHA0:
            return 0.0
        if self.branch == BRANCH_ALPHA_PI:
            return math.pi
        return math.nan


@dataclass
class SeparatrixCurve:
    """Energy level set through a fixed point, sampled in (P, alpha).

    Both signs of alpha are included (the flow is mirror symmetric in
    Pi3), ordered to form a single closed polyline through the owner.
    """

    owner: FixedPoint
    P: np.ndarray
    alpha: np.ndarray

    @property
    def is_empty(self) -> bool:
        # nothing on the level set beyond the fixed point itself
        return int(np.sum(np.abs(self.P - self.owner.P) > 1e-9)) == 0


@dataclass
class RootFamily:
    """One continuously-followed root of a branch cubic over the scan grid."""

    branch: str
    family_id: int
    tracked: bool
    P: np.ndarray
    stability: list[str]
    energy: np.ndarray


@dataclass(frozen=True)
class CrossingReport:
    """A localized fixed-point event along a scenario."""

    s: float
    kind: str            # tracked-crossing | pair-birth | pair-death | pole-flip
    classification: str  # saddle-center | root-collision | none
    branch: str
    involves_tracked: bool
    P: float
    tracked_stability_before: str
    tracked_stability_after: str


@dataclass
class CrossingScan:
    times: np.ndarray
    families: list[RootFamily]
    reports: list[CrossingReport]

    @property
    def tracked_crossings(self) -> list[CrossingReport]:
        return [r for r in self.reports if r.involves_tracked]


def branch_cos(branch: str) -> float:
    if branch == BRANCH_ALPHA0:
        return 1.0
    if branch == BRANCH_ALPHA_PI:
        return -1.0
    raise ValueError(f"not an interior branch: {branch!r}")


def cubic_coefficients(branch, omega_tilde, delta_tilde, lambda_s_tilde):
    """Coefficients [x^3, x^2, x, 1] of the branch fixed-point cubic."""
    c = branch_cos(branch)
    return [lambda_s_tilde, -1.5 * c * omega_tilde, delta_tilde, 0.5 * c * omega_tilde]


def _poly(coeffs, x):
    acc = 0.0
    for a in coeffs:
        acc = acc * x + a
    return acc


def branch_root_populations(branch, omega_tilde, delta_tilde, lambda_s_tilde):
    """Real roots x = sqrt(P) of the branch cubic inside [0, 1].

    Returns a sorted list of (x, clustered) pairs.  Roots come from the
    companion matrix with one Newton polish step; conjugate pairs with a
    tiny imaginary part are rescued as ill-conditioned real double roots
    (flagged clustered) rather than silently dropped or split.
    """
    coeffs = np.asarray(
        cubic_coefficients(branch, omega_tilde, delta_tilde, lambda_s_tilde), float)
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        return []
    cn = coeffs / scale
    k = 0
    while k < 3 and abs(cn[k]) <= 1e-13:
        k += 1
    cn = cn[k:]
    if cn.size <= 1:
        return []
    dcn = np.polyder(cn)
    roots = np.roots(cn)
    polished = []
    for r in roots:
        d = _poly(dcn, r)
        if abs(d) > 1e-300:
            r = r - _poly(cn, r) / d
        polished.append(r)

    found: list[tuple[float, bool]] = []
    used = [False] * len(polished)
    for i, r in enumerate(polished):
        if used[i]:
            continue
        if abs(r.imag) <= IMAG_ACCEPT_TOL:
            found.append((r.real, False))
            used[i] = True
        elif abs(r.imag) <= IMAG_CLUSTER_TOL:
            # candidate double root split off the axis by rounding: find its
            # conjugate partner, land on the stationary point of the cubic
            j = next((j for j in range(i + 1, len(polished))
                      if not used[j] and abs(polished[j].conjugate() - r) < 10 * abs(r.imag) + 1e-12),
                     None)
            if j is None:
                continue
            x = r.real
            for _ in range(3):
                d2 = _poly(np.polyder(dcn), x)
                if abs(d2) < 1e-300:
                    break
                x = x - _poly(dcn, x) / d2
            if abs(_poly(cn, x)) <= 1e-10:
                found.append((x, True))
                found.append((x, True))
                used[i] = used[j] = True

    out = []
    for x, clustered in found:
        if -1e-9 <= x <= 1.0 + 1e-9:
            out.append((min(max(x, 0.0), 1.0), clustered))
    return sorted(out)


def interior_determinant(P, branch, omega_tilde, delta_tilde, lambda_s_tilde):
    """det of the (P, alpha) linearization at an interior fixed point.

    The Jacobian is antidiagonal, [[0, A], [B, 0]]; positive determinant
    (-A*B) means an imaginary eigenvalue pair (elliptic), negative a real
    pair (hyperbolic) with rate sqrt(-det).
    """
    c = branch_cos(branch)
    A = omega_tilde * c * (1.0 - P) * math.sqrt(P)
    B = lambda_s_tilde - omega_tilde * c * (1.0 + 3.0 * P) / (4.0 * P ** 1.5)
    return -A * B


def _stability_from_det(det, det_tol):
    if det > det_tol:
        return ELLIPTIC
    if det < -det_tol:
        return HYPERBOLIC
    return DEGENERATE


def pole_determinant(omega_tilde, delta_tilde, lambda_s_tilde):
    """Stability discriminant of the cone point P = 1: mu^2 - omega^2."""
    mu = delta_tilde + lambda_s_tilde
    return mu * mu - omega_tilde * omega_tilde


def classify_stability(fp: FixedPoint, omega_tilde, delta_tilde, lambda_s_tilde,
                       det_tol: float = DET_DEGENERATE_TOL) -> str:
    """Stability class of a fixed point at the given frozen parameters."""
    if fp.branch == POLE_ALL_MOLECULES:
        return _stability_from_det(
            pole_determinant(omega_tilde, delta_tilde, lambda_s_tilde), det_tol)
    if fp.branch == POLE_ALL_ATOMS:
        if omega_tilde != 0.0:
            raise ValueError("P = 0 is only a fixed point at zero coupling")
        return ELLIPTIC
    det = interior_determinant(fp.P, fp.branch, omega_tilde, delta_tilde,
                               lambda_s_tilde)
    return _stability_from_det(det, det_tol)


def fixed_points_at(omega_tilde, delta_tilde, lambda_s_tilde,
                    det_tol: float = DET_DEGENERATE_TOL) -> list[FixedPoint]:
    """All instantaneous fixed points at frozen parameters.

    Interior roots of both branch cubics (ill-conditioned clusters are
    flagged degenerate), the P = 1 cone point always, and the P = 0 pole
    when the coupling is exactly zero.  Interior roots within 1e-9 of a
    pole merge into the pole entry.
    """
    if omega_tilde < 0:
        raise ValueError("omega_tilde must be nonnegative")
    points = []
    for branch in INTERIOR_BRANCHES:
        xs = branch_root_populations(branch, omega_tilde, delta_tilde,
                                     lambda_s_tilde)
        merged: list[tuple[float, bool]] = []
        for x, clustered in xs:
            if merged and abs(x - merged[-1][0]) <= 1e-9:
                merged[-1] = (merged[-1][0], True)
            else:
                merged.append((x, clustered))
        for x, clustered in merged:
            if x < 1e-9 or x > 1.0 - 1e-9:
                continue
            P = x * x
            alpha = 0.0 if branch == BRANCH_ALPHA0 else math.pi
            det = interior_determinant(P, branch, omega_tilde, delta_tilde,
                                       lambda_s_tilde)
            stability = DEGENERATE if clustered else _stability_from_det(det, det_tol)
            energy = reduced_hamiltonian(P, alpha, omega_tilde, delta_tilde,
                                         lambda_s_tilde)
            points.append(FixedPoint(P, branch, stability, energy))
    points.append(FixedPoint(
        1.0, POLE_ALL_MOLECULES,
        _stability_from_det(pole_determinant(omega_tilde, delta_tilde,
                                             lambda_s_tilde), det_tol),
        0.5 * delta_tilde + 0.25 * lambda_s_tilde))
    if omega_tilde == 0.0:
        points.append(FixedPoint(0.0, POLE_ALL_ATOMS, ELLIPTIC, 0.0))
    return points


def trace_separatrix(h_point: FixedPoint, omega_tilde, delta_tilde,
                     lambda_s_tilde, n_samples: int = 2000) -> SeparatrixCurve:
    """Sample the energy level set through ``h_point``.

    For a hyperbolic owner this is the separatrix organizing the
    portrait; for other owners it is just that point's level set (empty
    when the point is an energy extremum).  For each population the angle
    solves

        cos(alpha) = (h - delta*P/2 - lam*P^2/4) / ((om/2) (1-P) sqrt(P))

    and the curve keeps the populations where |cos| <= 1, refined where
    cos varies fast, with both alpha signs joined into one polyline.  At
    the cone point the quotient has the finite limit mu/om, so a curve
    owned by the P = 1 pole closes onto it.
    """
    if omega_tilde <= 0:
        raise ValueError("separatrix tracing needs a positive coupling")
    h = h_point.energy

    def cos_alpha(P):
        return ((h - 0.5 * delta_tilde * P - 0.25 * lambda_s_tilde * P * P)
                / (0.5 * omega_tilde * (1.0 - P) * np.sqrt(P)))

    eps = 1e-6
    grid = np.linspace(eps, 1.0 - eps, n_samples)
    if h_point.branch in INTERIOR_BRANCHES:
        grid = np.sort(np.append(grid, h_point.P))
    cos = cos_alpha(grid)

    # refine intervals where the level curve bends sharply in the chart
    jumps = np.flatnonzero(np.abs(np.diff(cos)) > 0.02)
    if jumps.size:
        extra = np.concatenate([np.linspace(grid[i], grid[i + 1], 10)[1:-1]
                                for i in jumps])
        grid = np.sort(np.concatenate([grid, extra]))
        cos = cos_alpha(grid)

    keep = np.abs(cos) <= 1.0 + 1e-12
    Ps = grid[keep]
    alphas = np.arccos(np.clip(cos[keep], -1.0, 1.0))

    if h_point.branch == POLE_ALL_MOLECULES:
        # limiting chart angle with which the level set enters the cone point
        mu = delta_tilde + lambda_s_tilde
        if abs(mu) <= omega_tilde:
            Ps = np.append(Ps, 1.0)
            alphas = np.append(alphas, math.acos(
                min(max(mu / omega_tilde, -1.0), 1.0)))

    # mirror across Pi3 = 0 into a single closed polyline
    P_out = np.concatenate([Ps, Ps[::-1]])
    alpha_out = np.concatenate([alphas, -alphas[::-1]])
    return SeparatrixCurve(owner=h_point, P=P_out, alpha=alpha_out)


@dataclass(frozen=True)
class PortraitSnapshot:
    """Fixed points and separatrices at one frozen parameter triple."""

    omega_tilde: float
    delta_tilde: float
    lambda_s_tilde: float
    fixed_points: list[FixedPoint] = field(default_factory=list)
    separatrices: list[SeparatrixCurve] = field(default_factory=list)


def portrait_at(omega_tilde, delta_tilde, lambda_s_tilde,
                n_sep_samples: int = 2000) -> PortraitSnapshot:
    """Fixed points plus one separatrix per hyperbolic point."""
    fps = fixed_points_at(omega_tilde, delta_tilde, lambda_s_tilde)
    seps = [trace_separatrix(fp, omega_tilde, delta_tilde, lambda_s_tilde,
                             n_sep_samples)
            for fp in fps if fp.stability == HYPERBOLIC and omega_tilde > 0]
    return PortraitSnapshot(omega_tilde, delta_tilde, lambda_s_tilde, fps, seps)


# ---------------------------------------------------------------------------
# crossing scans along a scenario


def _bisect_sign_change(f, a, b, tol):
    fa = f(a)
    for _ in range(200):
        if b - a <= tol:
            break
        m = 0.5 * (a + b)
        fm = f(m)
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def scan_crossings(scenario: TrackingScenario, n_time_samples: int = 400,
                   collision_tol: float = 1e-6,
                   max_family_jump: float = 0.05) -> CrossingScan:
    """Follow the instantaneous fixed points of a scenario through time.

    Roots are matched between consecutive samples by nearest neighbor in
    x = sqrt(P); a matched root moving further than ``max_family_jump``
    per step means the grid cannot support continuity and raises
    ScanResolutionError.  Events are refined by bisection to 1e-8 * tau:

    * tracked-crossing: the tracked root's linearization determinant
      changes sign (collision with another same-branch root, exchanging
      stability: classified saddle-center, or a tangency: root-collision);
    * pair-birth / pair-death: the number of real roots of one branch
      changes by two (fold), classified saddle-center;
    * pole-flip: the cone point's discriminant changes sign.
    """
    pulse = scenario.pulse
    target = scenario.target
    lam = scenario.params.lambda_s_tilde
    tau = scenario.params.tau
    detuning = design_detuning(scenario)
    lo, hi = scenario.window
    times = np.linspace(lo, hi, n_time_samples)
    time_tol = 1e-8 * tau

    def roots_at(s, branch):
        # x = 0 only turns up at zero coupling, where it is the atomic pole
        return [x for x, _ in branch_root_populations(
            branch, pulse(s), detuning(s), lam) if x > 1e-9]

    def distinct(xs):
        out = []
        for x in sorted(xs):
            if not out or x - out[-1] > 1e-9:
                out.append(x)
        return out

    # --- sample roots and track families per branch -----------------------
    samples = {br: [distinct(roots_at(s, br)) for s in times]
               for br in INTERIOR_BRANCHES}

    families: list[RootFamily] = []
    fam_x: dict[int, float] = {}
    fam_live: dict[int, bool] = {}
    next_id = 0

    fam_birth: dict[int, int] = {}

    def new_family(branch, i, x):
        nonlocal next_id
        fam = RootFamily(branch=branch, family_id=next_id, tracked=False,
                         P=np.full(times.size, np.nan),
                         stability=[""] * times.size,
                         energy=np.full(times.size, np.nan))
        next_id += 1
        families.append(fam)
        fam_x[fam.family_id] = x
        fam_live[fam.family_id] = True
        fam_birth[fam.family_id] = i
        return fam

    tracked_branch = scenario.branch
    tracked_fam: RootFamily | None = None
    per_branch_live: dict[str, list[RootFamily]] = {br: [] for br in INTERIOR_BRANCHES}
    violations: list[tuple[int, float, float, float, int]] = []
    for branch in INTERIOR_BRANCHES:
        pin = branch == tracked_branch and scenario.compensate_kerr
        for i, s in enumerate(times):
            xs = list(samples[branch][i])
            xs_all = list(xs)
            live = [f for f in per_branch_live[branch] if fam_live[f.family_id]]
            assign = {}
            # with compensation on the designed root is known exactly; pin the
            # tracked family to it so identities do not swap at collisions
            if pin and xs:
                xt = math.sqrt(target(s))
                j = min(range(len(xs)), key=lambda k: abs(xs[k] - xt))
                if abs(xs[j] - xt) <= 1e-6:
                    x_pin = xs.pop(j)
                    if tracked_fam is None:
                        tracked_fam = new_family(branch, i, x_pin)
                        tracked_fam.tracked = True
                        per_branch_live[branch].append(tracked_fam)
                    assign[tracked_fam.family_id] = (x_pin, tracked_fam)
                    live = [f for f in live
                            if f.family_id != tracked_fam.family_id]
            pairs = sorted(
                ((abs(x - fam_x[f.family_id]), x, f) for x in xs for f in live),
                key=lambda t: t[0])
            matched_f, matched_x = set(), set()
            for d, x, f in pairs:
                if f.family_id in matched_f or x in matched_x:
                    continue
                # continuity is ambiguous when an established family moves,
                # in one step, by an amount comparable to the separation from
                # the nearest other root; judged after the branch is done so
                # that sqrt(t) kinematics around fold births and deaths (where
                # the candidates coincide anyway) can be excused
                age = i - fam_birth[f.family_id]
                if age > 5 and d > max_family_jump:
                    gap = min((abs(x - x2) for x2 in xs_all if x2 != x),
                              default=math.inf)
                    if d > 0.45 * gap:
                        violations.append((i, s, d, gap, f.family_id))
                matched_f.add(f.family_id)
                matched_x.add(x)
                assign[f.family_id] = (x, f)
            for x in xs:
                if x not in matched_x:
                    f = new_family(branch, i, x)
                    per_branch_live[branch].append(f)
                    assign[f.family_id] = (x, f)
            for f in live:
                if f.family_id not in assign:
                    fam_live[f.family_id] = False
            om, dl = pulse(s), detuning(s)
            for x, f in assign.values():
                fam_x[f.family_id] = x
                P = x * x
                f.P[i] = P
                if 1e-9 < x < 1.0 - 1e-9:
                    det = interior_determinant(P, branch, om, dl, lam)
                    f.stability[i] = _stability_from_det(det, DET_DEGENERATE_TOL)
                else:
                    f.stability[i] = DEGENERATE
                alpha = 0.0 if branch == BRANCH_ALPHA0 else math.pi
                f.energy[i] = reduced_hamiltonian(P, alpha, om, dl, lam)

    # --- judge deferred matching ambiguities --------------------------------
    by_id = {f.family_id: f for f in families}
    for i, s, d, gap, fid in violations:
        alive = np.flatnonzero(~np.isnan(by_id[fid].P))
        if alive.size and alive[-1] <= i + 3:
            continue  # converging into a fold; the pair dies right after
        raise ScanResolutionError(
            f"root moved by {d:.3g} in one step at s = {s:.6g}, comparable "
            f"to the {gap:.3g} separation from its neighbor; increase "
            "n_time_samples")

    # --- designate the tracked family when continuity had to decide --------
    x_target0 = math.sqrt(target(times[0]))
    if tracked_fam is None:
        candidates = [f for f in families
                      if f.branch == tracked_branch and not math.isnan(f.P[0])]
        if not candidates:
            raise ScanResolutionError("no root found for the tracked branch at "
                                      "the start of the window")
        tracked_fam = min(candidates,
                          key=lambda f: abs(math.sqrt(f.P[0]) - x_target0))
        tracked_fam.tracked = True
    tracked = tracked_fam

    def tracked_x(s):
        if scenario.compensate_kerr:
            return math.sqrt(target(s))
        i = int(np.clip(np.searchsorted(times, s), 1, times.size - 1))
        ref = np.nan_to_num(np.sqrt(tracked.P[i - 1]), nan=x_target0)
        xs = roots_at(s, tracked_branch)
        return min(xs, key=lambda x: abs(x - ref)) if xs else ref

    def tracked_det(s):
        x = tracked_x(s)
        return interior_determinant(x * x, tracked_branch, pulse(s),
                                    detuning(s), lam)

    reports: list[CrossingReport] = []

    def tracked_stab(i):
        return tracked.stability[i] or DEGENERATE

    # --- tracked-root stability flips --------------------------------------
    dets = np.array([tracked_det(s) for s in times])
    for i in range(times.size - 1):
        if dets[i] == 0.0 or dets[i] * dets[i + 1] < 0:
            s_star = _bisect_sign_change(tracked_det, times[i], times[i + 1],
                                         time_tol)
            before = _stability_from_det(dets[i], DET_DEGENERATE_TOL)
            after = _stability_from_det(dets[i + 1], DET_DEGENERATE_TOL)
            exchange = (before != after and DEGENERATE not in (before, after))
            reports.append(CrossingReport(
                s=float(s_star), kind="tracked-crossing",
                classification="saddle-center" if exchange else "root-collision",
                branch=tracked_branch, involves_tracked=True,
                P=float(tracked_x(s_star) ** 2),
                tracked_stability_before=before,
                tracked_stability_after=after))

    # --- tangencies: near-collision without a determinant sign change ------
    for i in range(times.size):
        if tracked_stab(i) == DEGENERATE and not math.isnan(tracked.P[i]):
            xs = samples[tracked_branch][i]
            xt = math.sqrt(tracked.P[i])
            near = [x for x in xs if 0 < abs(x - xt) <= collision_tol]
            if near and not any(abs(r.s - times[i]) < 2 * (times[1] - times[0])
                                for r in reports):
                reports.append(CrossingReport(
                    s=float(times[i]), kind="tracked-crossing",
                    classification="root-collision", branch=tracked_branch,
                    involves_tracked=True, P=float(tracked.P[i]),
                    tracked_stability_before=tracked_stab(max(i - 1, 0)),
                    tracked_stability_after=tracked_stab(min(i + 1, times.size - 1))))

    # --- fold births and deaths of root pairs ------------------------------
    def count_at(s, branch):
        return len(distinct(roots_at(s, branch)))

    for branch in INTERIOR_BRANCHES:
        counts = [len(xs) for xs in samples[branch]]
        for i in range(times.size - 1):
            if counts[i] == counts[i + 1]:
                continue
            if abs(counts[i + 1] - counts[i]) == 1:
                # a single root entering or leaving [0, 1] passes through a
                # pole; that instant is reported by the pole-flip detector
                continue
            growing = counts[i + 1] > counts[i]
            threshold = 0.5 * (counts[i] + counts[i + 1])
            s_star = _bisect_sign_change(
                lambda s, br=branch, th=threshold:
                    1.0 if count_at(s, br) > th else -1.0,
                times[i], times[i + 1], time_tol)
            # the appearing (or vanishing) roots are the ones left over after
            # pairing the richer sample with the poorer one by proximity
            base, extra = ((samples[branch][i], list(samples[branch][i + 1]))
                           if growing else
                           (samples[branch][i + 1], list(samples[branch][i])))
            for x in base:
                if extra:
                    extra.pop(min(range(len(extra)), key=lambda k: abs(extra[k] - x)))
            changed = sorted(extra)
            # a root leaving through a pole is the pole's event, not a fold
            if not changed or changed[0] > 1.0 - 1e-6 or changed[-1] < 1e-6:
                continue
            x_pair = float(np.mean(changed))
            involves = (not math.isnan(tracked.P[i])
                        and abs(math.sqrt(tracked.P[i]) - x_pair) <= collision_tol)
            reports.append(CrossingReport(
                s=float(s_star), kind="pair-birth" if growing else "pair-death",
                classification="saddle-center", branch=branch,
                involves_tracked=bool(involves), P=x_pair ** 2,
                tracked_stability_before=tracked_stab(i),
                tracked_stability_after=tracked_stab(i + 1)))

    # --- cone-point stability flips -----------------------------------------
    def pole_det(s):
        return pole_determinant(pulse(s), detuning(s), lam)

    pdets = np.array([pole_det(s) for s in times])
    for i in range(times.size - 1):
        if pdets[i] * pdets[i + 1] < 0:
            s_star = _bisect_sign_change(pole_det, times[i], times[i + 1], time_tol)
            xt = tracked_x(s_star)
            reports.append(CrossingReport(
                s=float(s_star), kind="pole-flip", classification="saddle-center",
                branch=POLE_ALL_MOLECULES,
                involves_tracked=bool(abs(xt - 1.0) <= collision_tol), P=1.0,
                tracked_stability_before=tracked_stab(i),
                tracked_stability_after=tracked_stab(i + 1)))

    reports.sort(key=lambda r: r.s)
    return CrossingScan(times=times, families=families, reports=reports)
