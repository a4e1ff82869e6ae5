"""Named verification suites producing structured pass/fail reports.

Each suite pits the tracking engine against an independent oracle: closed
forms, equation-of-motion residuals from finite differences, the projection
method, conservation laws, boosts, asymptotics, and the regime table.  The
command-line ``verify`` subcommand runs these; the acceptance tests call
them with the same parameters.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import oracles
from .cauchy import CauchyData, implied_velocities, solve_cauchy
from .models import CharacteristicCM, CharacteristicRS, PolynomialProduct
from .phase_space import INVERSE, QUADRATIC, PhasePoint, evolve, lorentz_boost
from .presets import figure_presets, polynomial_regime_sweep, sinh_regime_sweep
from .rootfind import RootFindOptions, find_real_roots
from .tracker import snapshot_at, track


@dataclass(frozen=True)
class CheckResult:
    suite: str
    check: str
    value: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        mark = "pass" if self.passed else "FAIL"
        return f"[{mark}] {self.suite}/{self.check}: {self.value:.3e} (tol {self.tolerance:.1e})"


def _check(suite, name, value, tol) -> CheckResult:
    return CheckResult(suite, name, float(value), float(tol), bool(value <= tol))


def _flag(suite, name, ok) -> CheckResult:
    return CheckResult(suite, name, 0.0 if ok else 1.0, 0.5, bool(ok))


_FAST = RootFindOptions(n_scan=1024)


# --------------------------------------------------------------------------
# closed form
# --------------------------------------------------------------------------

def suite_closed_form(n_random=100, seed=7, t_span=10.0, samples=41) -> list[CheckResult]:
    """Tracked polynomial pairs against the exact sum/difference formulas."""
    rng = np.random.default_rng(seed)
    out = []
    worst_pos = 0.0
    worst_event = 0.0
    for k in range(n_random):
        C = rng.uniform(-5, 5)
        sep = rng.uniform(0.4, 4.0)
        if abs(sep * sep - C) < 0.05:  # keep away from the degenerate manifold
            C -= 0.2
        x0 = rng.uniform(-2, 2)
        v0 = rng.uniform(-1.5, 1.5)
        v12 = rng.uniform(0.3, 2.0) * rng.choice([-1, 1])
        data = CauchyData([x0 - sep / 2, x0 + sep / 2], [v0 - v12 / 2, v0 + v12 / 2])
        model = PolynomialProduct(C=C, n=2)
        point = solve_cauchy(model, QUADRATIC, data)
        t_events = oracles.polynomial_pair_event_times(C, data)
        ts = np.linspace(-t_span, t_span, samples)
        s_exp, d_sq = oracles.polynomial_pair_closed_form(C, data, ts)
        for t, s_e, dsq in zip(ts, s_exp, d_sq):
            if len(t_events) and np.min(np.abs(t - t_events)) < 1e-2:
                continue  # position conditioning degenerates at events
            snap = snapshot_at(model, point, QUADRATIC, t, _FAST)
            if dsq <= 0:
                worst_pos = max(worst_pos, float(snap.count))
                continue
            if snap.count != 2:
                worst_pos = max(worst_pos, 1.0)
                continue
            xs = np.array([e.x for e in snap.entries])
            exp_roots = np.sort([(s_e - np.sqrt(dsq)) / 2, (s_e + np.sqrt(dsq)) / 2])
            worst_pos = max(worst_pos, float(np.max(np.abs(xs - exp_roots))))
        inside = t_events[np.abs(t_events) < t_span] if len(t_events) else []
        if len(inside):
            lo, hi = float(np.min(inside)), float(np.max(inside))
            traj = track(model, point, QUADRATIC,
                         (lo - 0.6, hi + 0.6, 0.05), _FAST, refine_crossings=False)
            got = sorted(e.t for e in traj.events if e.kind != "crossing")
            if len(got) != len(inside):
                worst_event = np.inf
            else:
                worst_event = max(worst_event, float(np.max(np.abs(np.sort(inside) - got))))
    out.append(_check("closed-form", f"positions ({n_random} random configs)", worst_pos, 1e-9))
    out.append(_check("closed-form", "event times vs quadratic zeros", worst_event, 1e-8))

    # the concrete pinned case
    data = CauchyData([-0.5, 0.5], [-1.0, 1.0])
    expected = np.sort(oracles.polynomial_pair_event_times(2.0, data))
    pinned = np.array([(1 - np.sqrt(2)) / 2, (1 + np.sqrt(2)) / 2])
    out.append(_check("closed-form", "pinned case formula zeros", np.max(np.abs(expected - pinned)), 1e-12))
    model = PolynomialProduct(C=2.0, n=2)
    point = solve_cauchy(model, QUADRATIC, data)
    traj = track(model, point, QUADRATIC, (-1.0, 2.0, 0.02), _FAST, refine_crossings=False)
    got = np.sort([e.t for e in traj.events if e.kind != "crossing"])
    out.append(_check("closed-form", "pinned case tracked events", np.max(np.abs(got - pinned)), 1e-8))
    return out


# --------------------------------------------------------------------------
# equations of motion
# --------------------------------------------------------------------------

def suite_eom_residuals(dt=1e-3) -> list[CheckResult]:
    """FD accelerations of tracked runs against the closed-form equations."""
    out = []
    presets = figure_presets()

    worst = 0.0
    for name, probes in [("pair_repulsion", (-2.0, 0.4, 1.7)), ("pair_finite_life", (-0.1, 0.3, 0.8))]:
        pre = presets[name]
        for t in probes:
            x, v, a = oracles.probe_state(pre.model, pre.point, pre.dispersion, t, dt, opts=_FAST)
            worst = max(worst, oracles.residual_eom("polynomial_pair", x, v, a, C=pre.model.C))
    out.append(_check("eom", "polynomial pair", worst, 1e-5))

    worst = 0.0
    for name, probes in [("sinh_oscillation", (-0.35, 0.15, 0.6)), ("sinh_cascade", (-1.21, -0.21, 3.28))]:
        pre = presets[name]
        for t in probes:
            x, v, a = oracles.probe_state(pre.model, pre.point, pre.dispersion, t, dt, opts=_FAST)
            worst = max(worst, oracles.residual_eom("sinh_pair", x, v, a, C=pre.model.C))
    out.append(_check("eom", "sinh pair", worst, 1e-5))

    worst = 0.0
    pre = presets["relativistic_repulsion"]
    for t in (-2.0, 0.5, 1.5):
        x, v, a = oracles.probe_state(pre.model, pre.point, pre.dispersion, t, dt, opts=_FAST)
        worst = max(worst, oracles.residual_eom("relativistic_pair", x, v, a, C=pre.model.C))
    pre = presets["relativistic_finite_life"]
    for t in (-1.2, -0.3):
        x, v, a = oracles.probe_state(pre.model, pre.point, pre.dispersion, t, dt, opts=_FAST)
        worst = max(worst, oracles.residual_eom("relativistic_pair", x, v, a, C=pre.model.C))
    out.append(_check("eom", "relativistic pair", worst, 1e-5))

    worst = 0.0
    for name, label, probes in [
        ("sg_soliton_soliton", +1, (0.45, 1.1)),
        ("sg_soliton_antisoliton", -1, (0.8, 1.6)),
        ("sg_breather", -1, (0.2, 0.45)),
    ]:
        pre = presets[name]
        for t in probes:
            x, v, a = oracles.probe_state(
                pre.model, pre.point, pre.dispersion, t, dt, frame="lab", opts=_FAST
            )
            worst = max(worst, oracles.residual_eom("sg_pair", x, v, a, label=label))
    out.append(_check("eom", "relativistic sinh pair (centre of momentum)", worst, 1e-4))
    return out


# --------------------------------------------------------------------------
# projection identity
# --------------------------------------------------------------------------

def suite_projection(n_random=20, seed=11) -> list[CheckResult]:
    """det(Q(t)+W-xI) roots vs spectra of X(tau)+(t-tau)L(tau)."""
    rng = np.random.default_rng(seed)
    out = []
    for kind, model_cls in [("cm", CharacteristicCM), ("rs", CharacteristicRS)]:
        worst = 0.0
        for k in range(n_random):
            n = 2 if k % 2 == 0 else 3
            gamma = rng.uniform(0.2, 1.2)
            model = model_cls(gamma=gamma)
            a = np.sort(rng.uniform(-6, 6, n))
            a += np.arange(n) * 2.0  # keep generically separated
            p = rng.uniform(-1.5, 1.5, n)
            while np.min(np.abs(np.subtract.outer(p, p) + np.eye(n))) < 0.15:
                p = rng.uniform(-1.5, 1.5, n)
            point = PhasePoint.real(a, p)
            tau = rng.uniform(-1.0, 1.0)
            snap = snapshot_at(model, point, QUADRATIC, tau, _FAST)
            if snap.count != n:
                continue  # tau landed in a gap; the sweep still covers plenty
            xs = np.array([e.x for e in snap.entries])
            vs = implied_velocities(model, evolve(point, QUADRATIC, tau), QUADRATIC, xs)
            ell = oracles.build_L(kind, xs, vs, gamma)
            X0 = np.diag(xs)
            for t in np.linspace(tau - 4.0, tau + 4.0, 10):
                engine = snapshot_at(model, point, QUADRATIC, t, _FAST)
                proj = oracles.projection_roots(X0, ell, t - tau, _FAST)
                ex = np.array([e.x for e in engine.entries])
                if len(ex) != len(proj):
                    worst = np.inf
                    continue
                if len(ex):
                    worst = max(worst, float(np.max(np.abs(ex - proj))))
        out.append(_check("projection", f"{kind} identity ({n_random} configs, 10 times)", worst, 1e-8))
    return out


# --------------------------------------------------------------------------
# conservation
# --------------------------------------------------------------------------

def suite_conservation(seed=3) -> list[CheckResult]:
    """Induced-Hamiltonian constancy and re-solved momentum constancy."""
    out = []
    presets = figure_presets()

    worst_h = 0.0
    worst_canon = 0.0
    for name in ("pair_repulsion", "pair_finite_life"):
        pre = presets[name]
        model, point = pre.model, pre.point
        h_ref = None
        h_exact = float(np.sum((point.p * point.p).real)) / 2.0
        for t in np.linspace(*pre.t_grid[:2], 9):
            snap = snapshot_at(model, point, QUADRATIC, t, _FAST)
            if snap.count != 2:
                continue
            xs = np.array([e.x for e in snap.entries])
            x12_sq = (xs[0] - xs[1]) ** 2
            if abs(x12_sq - model.C) < 1e-3 * max(1.0, abs(model.C)):
                continue  # canonical transform degenerates at x12^2 = C
            vs = implied_velocities(model, evolve(point, QUADRATIC, t), QUADRATIC, xs)
            P = oracles.conjugate_momenta(xs, vs, model.C)
            h = oracles.induced_hamiltonian(xs, P, model.C)
            h_ref = h if h_ref is None else h_ref
            worst_h = max(worst_h, abs(h - h_ref))
            worst_canon = max(worst_canon, abs(h - h_exact))
    out.append(_check("conservation", "induced Hamiltonian drift", worst_h, 1e-9))
    out.append(_check("conservation", "induced H equals sum p^2/2", worst_canon, 1e-9))

    worst = 0.0
    for name in ("pair_repulsion", "sinh_oscillation", "cm_pair", "rs_pair",
                 "relativistic_repulsion", "soliton_soliton"):
        pre = presets[name]
        d = pre.dispersion
        p_ref = None
        count = 0
        for t in np.linspace(pre.t_grid[0], pre.t_grid[1], 15):
            if count >= 5:
                break
            snap = snapshot_at(pre.model, pre.point, d, t, _FAST)
            if snap.count != pre.point.n:
                continue
            xs = np.array([e.x for e in snap.entries])
            vs = implied_velocities(pre.model, evolve(pre.point, d, t), d, xs)
            try:
                sol = solve_cauchy(pre.model, d, CauchyData(xs, vs), epsilon=pre.point.epsilon)
            except Exception:
                continue
            ps = np.sort_complex(sol.p)
            if p_ref is None:
                p_ref = ps
            else:
                worst = max(worst, float(np.max(np.abs(ps - p_ref))))
            count += 1
    out.append(_check("conservation", "re-solved momenta drift (5 probes)", worst, 1e-8))
    return out


# --------------------------------------------------------------------------
# boosts
# --------------------------------------------------------------------------

def suite_boost() -> list[CheckResult]:
    out = []
    presets = figure_presets()
    worst = 0.0
    for name in ("sg_soliton_soliton", "sg_soliton_antisoliton", "sg_breather",
                 "relativistic_repulsion", "relativistic_finite_life"):
        pre = presets[name]
        for lam in (0.5, 2.0, 3.0):
            dev = oracles.boost_covariance_check(
                pre.model, pre.point, INVERSE, lam, etas=(-1.3, -0.4, 0.2, 0.9)
            )
            worst = max(worst, dev)
    out.append(_check("boost", "cone-variable rescaling covariance", worst, 1e-9))
    return out


# --------------------------------------------------------------------------
# asymptotics
# --------------------------------------------------------------------------

def suite_asymptotics() -> list[CheckResult]:
    out = []
    model = CharacteristicCM(gamma=0.9)
    point = PhasePoint.real([-1.0, 1.0], [0.7, -0.5])
    report = oracles.asymptotic_check(model, point, QUADRATIC)
    dev = max(abs(r - 2.0) for r in report.ratios)
    out.append(_check("asymptotics", "decay ratios halve (cm pair)", dev, 0.3))
    model = CharacteristicCM(gamma=0.6)
    point = PhasePoint.real([-2.0, 0.5, 2.5], [0.8, 0.05, -0.7])
    report = oracles.asymptotic_check(model, point, QUADRATIC)
    dev = max(abs(r - 2.0) for r in report.ratios)
    out.append(_check("asymptotics", "decay ratios halve (cm triple)", dev, 0.3))
    return out


# --------------------------------------------------------------------------
# regimes
# --------------------------------------------------------------------------

def _event_window(model, data):
    """A time window generously covering the closed-form event instants."""
    times = oracles.polynomial_pair_event_times(model.C, data)
    if len(times) == 0:
        return (-5.0, 5.0, 0.05)
    return (float(times[0]) - 1.0, float(times[-1]) + 1.0, 0.02)


def suite_regimes() -> list[CheckResult]:
    out = []
    ok = True
    for model, data, expected in polynomial_regime_sweep():
        got = oracles.regime_classify(model, data)
        if got != expected:
            ok = False
            continue
        point = solve_cauchy(model, QUADRATIC, data)
        traj = track(model, point, QUADRATIC, _event_window(model, data), _FAST,
                     refine_crossings=False)
        ok = ok and _events_match(traj, got)
    out.append(_flag("regimes", "polynomial three-way table", ok))

    ok = True
    for model, data, expected in sinh_regime_sweep():
        got = oracles.regime_classify(model, data)
        if got != expected:
            ok = False
            continue
        point = solve_cauchy(model, QUADRATIC, data)
        grid = (-6.0, 6.0, 0.04) if got == oracles.VIRTUAL_CASCADE else (-4.0, 4.0, 0.04)
        if got == oracles.CHESHIRIZATION:
            grid = _sinh_chesh_window(model.C, point)
        traj = track(model, point, QUADRATIC, grid, _FAST, refine_crossings=False)
        ok = ok and _events_match(traj, got)
    out.append(_flag("regimes", "sinh four-way table", ok))
    return out


def _sinh_chesh_window(C, point):
    """Window bracketing the sinh gap: where cosh q12(t) crosses 1 - 2C."""
    q12 = (point.q[0] - point.q[1]).real
    p12 = (point.p[0] - point.p[1]).real
    edge = np.arccosh(1.0 - 2.0 * C)
    ts = sorted([(s * edge - q12) / p12 for s in (-1, 1)])
    return (ts[0] - 1.0, ts[1] + 1.0, 0.02)


def _events_match(traj, regime) -> bool:
    from .oracles import predicted_events

    want = predicted_events(regime)
    cre = len(traj.events_of("creation"))
    ann = len(traj.events_of("annihilation"))
    if want["recurring"]:
        return cre >= want["creation"] and ann >= want["annihilation"]
    return cre == want["creation"] and ann == want["annihilation"]


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------

SUITES = {
    "closed-form": suite_closed_form,
    "eom-residuals": suite_eom_residuals,
    "projection": suite_projection,
    "conservation": suite_conservation,
    "boost": suite_boost,
    "asymptotics": suite_asymptotics,
    "regimes": suite_regimes,
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        results = []
        for fn in SUITES.values():
            results.extend(fn())
        return results
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITES)} or 'all'")
    return SUITES[name]()


def report_json(results: list[CheckResult]) -> str:
    return json.dumps([asdict(r) for r in results], indent=2)
