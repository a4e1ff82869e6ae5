"""Time sweeps, world-line assembly, and event localization.

Trajectories of the induced system are never integrated: every snapshot is
an independent root-find on the exactly-evolved phase point.  Matching
between snapshots uses a minimum-cost assignment on predicted positions;
creation/annihilation instants are localized by bisecting the sign of the
local extremum of the generating function between the merging pair, which
stays well-conditioned where the pair separation itself falls below scan
resolution.

``dt`` must resolve the event structure: a creation and annihilation of the
same pair falling inside a single step leaves no count change to detect.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import models as _models
from .errors import CountChangeNot2, WindowTooSmall
from .phase_space import Dispersion, PhasePoint, evolve
from .rootfind import RootFindOptions, RootRecord, RootSet, find_real_roots

#: Fraction of the window a matched root may move between snapshots before
#: the interval is subdivided.
MAX_STEP_FRACTION = 0.10

#: Default relative localization tolerance for event times.
EVENT_TOL_T = 1e-10


@dataclass(frozen=True)
class RootSnapshot:
    """Roots at one time, sorted ascending, with factor tags."""

    t: float
    entries: tuple[RootRecord, ...]
    window: tuple[float, float]

    @property
    def count(self) -> int:
        return len(self.entries)

    def factor_count(self, factor_id) -> int:
        return sum(1 for e in self.entries if e.factor_id == factor_id)

    def factor_indices(self, factor_id):
        return [i for i, e in enumerate(self.entries) if e.factor_id == factor_id]


@dataclass
class Event:
    kind: str  # "creation" | "annihilation" | "crossing"
    t: float
    x: float
    line_ids: tuple[int, ...]


@dataclass
class WorldLine:
    id: int
    factor_id: int | None
    times: list[float] = field(default_factory=list)
    positions: list[float] = field(default_factory=list)
    birth: Event | None = None
    death: Event | None = None

    def velocity_samples(self) -> np.ndarray:
        """Central-difference velocity estimates at each sample."""
        if len(self.times) < 2:
            return np.zeros(len(self.times))
        return np.gradient(np.array(self.positions), np.array(self.times))

    @property
    def t0(self) -> float:
        return self.times[0]

    @property
    def t1(self) -> float:
        return self.times[-1]

    def position_at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.positions))


@dataclass
class Trajectory:
    """A tracked run together with the data that generated it."""

    model: object
    point0: PhasePoint
    dispersion: Dispersion
    frame: str
    snapshots: list[RootSnapshot]
    lines: list[WorldLine]
    events: list[Event]

    def counts(self) -> np.ndarray:
        return np.array([s.count for s in self.snapshots])

    def events_of(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]


# --------------------------------------------------------------------------
# snapshots
# --------------------------------------------------------------------------

def snapshot_at(model, point0, d, t, opts=None, frame="native") -> RootSnapshot:
    """Root snapshot at time t from the phase point given at time 0."""
    opts = opts or RootFindOptions()
    if frame == "native":
        rs = find_real_roots(model, evolve(point0, d, t), opts)
        return RootSnapshot(float(t), rs.entries, rs.window)
    if frame == "lab":
        return _lab_snapshot(model, point0, d, t, opts)
    raise ValueError(f"unknown frame {frame!r}")


def lab_root_function(model, point0: PhasePoint, d: Dispersion, t: float, factor=None):
    """g(x) whose zeros are lab-frame positions at time t for cone models.

    The cone coordinates are xi = x + t, eta = x - t; the phase point is
    given at eta = 0 and evolved by eta = x - t separately for every sample.
    """
    a, p, eps = point0.q, point0.p, point0.epsilon
    hp = d.velocity(p)

    def g(xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        qrows = a[None, :] + (xs - t)[:, None] * hp[None, :]
        vals = _models.generating_values_rows(model, qrows, p, eps, xs + t, factor=factor)
        return np.asarray(vals.real, dtype=float)

    def dg(x):
        h = 1e-6 * max(1.0, abs(x))
        return float((g(np.array([x + h]))[0] - g(np.array([x - h]))[0]) / (2 * h))

    g.derivative = dg
    return g


def _lab_window(model, point0, d, t):
    centre = float(np.mean(point0.q.real))
    lo, hi = _models_default_window(model, point0)
    half = 0.5 * (hi - lo)
    drift = (1.0 + float(np.max(np.abs(d.velocity(point0.p))))) * (abs(t) + 1.0)
    return centre - half - drift, centre + half + drift


def _models_default_window(model, point0):
    from .rootfind import default_window

    return default_window(model, point0)


def _lab_snapshot(model, point0, d, t, opts) -> RootSnapshot:
    from .rootfind import NEAR_DOUBLE_FRACTION, _windowed_roots

    auto = opts.window is None
    window = _lab_window(model, point0, d, t) if auto else opts.window
    for _ in range(12):
        entries = []
        cell = (window[1] - window[0]) / (opts.n_scan - 1)
        edge_hit = False
        factor_ids = (0, 1) if model.factorizes else (None,)
        for fid in factor_ids:
            g = lab_root_function(model, point0, d, t, factor=fid)
            roots, slope_scale = _windowed_roots(g, window, opts)
            for r in roots:
                if r < window[0] + cell or r > window[1] - cell:
                    edge_hit = True
                    break
                slope = abs(g.derivative(r))
                entries.append(
                    RootRecord(r, fid, slope < NEAR_DOUBLE_FRACTION * slope_scale)
                )
            if edge_hit:
                break
        if not edge_hit:
            entries.sort(key=lambda e: e.x)
            return RootSnapshot(float(t), tuple(entries), window)
        if not auto:
            raise WindowTooSmall(f"lab root near window edge at t={t}")
        mid = 0.5 * (window[0] + window[1])
        half = 0.8 * (window[1] - window[0])
        window = (mid - half, mid + half)
    raise WindowTooSmall("lab window kept growing")


# --------------------------------------------------------------------------
# simulation sweep with adaptive substeps
# --------------------------------------------------------------------------

def simulate(
    model,
    point0: PhasePoint,
    d: Dispersion,
    t_grid: tuple[float, float, float],
    opts: RootFindOptions | None = None,
    frame: str = "native",
    max_depth: int = 16,
) -> list[RootSnapshot]:
    """Snapshots on [t0, t1] at spacing dt, subdivided near fast segments.

    The phase point is understood at t = 0; evolution to each snapshot time
    is exact, so snapshots are independent of one another.
    """
    t0, t1, dt = t_grid
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = max(2, int(round((t1 - t0) / dt)) + 1)
    times = np.linspace(t0, t1, n)
    opts = opts or RootFindOptions()

    snaps = [snapshot_at(model, point0, d, t, opts, frame) for t in times]
    out = [snaps[0]]
    for a, b in zip(snaps[:-1], snaps[1:]):
        out.extend(_subdivide(model, point0, d, a, b, opts, frame, max_depth))
    return out


def _needs_split(a: RootSnapshot, b: RootSnapshot) -> bool:
    width = max(a.window[1] - a.window[0], b.window[1] - b.window[0])
    factor_ids = {e.factor_id for e in a.entries} | {e.factor_id for e in b.entries}
    for fid in factor_ids:
        xa = np.array([a.entries[i].x for i in a.factor_indices(fid)])
        xb = np.array([b.entries[i].x for i in b.factor_indices(fid)])
        if abs(len(xa) - len(xb)) > 2:
            return True
        if len(xa) and len(xb):
            # nearest-neighbour displacement is enough to detect steep segments
            disp = np.max(np.min(np.abs(xb[None, :] - xa[:, None]), axis=1))
            if disp > MAX_STEP_FRACTION * width:
                return True
    return False


def _subdivide(model, point0, d, a, b, opts, frame, depth):
    if depth <= 0 or not _needs_split(a, b):
        return [b]
    tm = 0.5 * (a.t + b.t)
    m = snapshot_at(model, point0, d, tm, opts, frame)
    left = _subdivide(model, point0, d, a, m, opts, frame, depth - 1)
    right = _subdivide(model, point0, d, m, b, opts, frame, depth - 1)
    return left + right


# --------------------------------------------------------------------------
# matching
# --------------------------------------------------------------------------

def match_roots(prev: RootSnapshot, nxt: RootSnapshot, predictions=None):
    """Minimum-cost assignment of roots across two snapshots, per factor.

    ``predictions`` gives the expected position of each prev entry at the
    next time (defaults to its current position).  Returns
    (pairs, unmatched_prev, unmatched_next) with global entry indices.
    """
    if predictions is None:
        predictions = [e.x for e in prev.entries]
    pairs, un_prev, un_next = [], [], []
    factor_ids = {e.factor_id for e in prev.entries} | {e.factor_id for e in nxt.entries}
    for fid in sorted(factor_ids, key=lambda v: (v is None, v)):
        ia = prev.factor_indices(fid)
        ib = nxt.factor_indices(fid)
        if not ia:
            un_next.extend(ib)
            continue
        if not ib:
            un_prev.extend(ia)
            continue
        cost = np.abs(
            np.array([predictions[i] for i in ia])[:, None]
            - np.array([nxt.entries[j].x for j in ib])[None, :]
        )
        rows, cols = linear_sum_assignment(cost)
        matched_a = set()
        matched_b = set()
        for r, c in zip(rows, cols):
            pairs.append((ia[r], ib[c]))
            matched_a.add(ia[r])
            matched_b.add(ib[c])
        un_prev.extend(i for i in ia if i not in matched_a)
        un_next.extend(j for j in ib if j not in matched_b)
    return pairs, un_prev, un_next


# --------------------------------------------------------------------------
# event localization
# --------------------------------------------------------------------------

def _factor_g(model, point0, d, frame, t, factor_id):
    if frame == "lab":
        return lab_root_function(model, point0, d, t, factor=factor_id)
    pt = evolve(point0, d, t)
    return _models.root_function(model, pt, factor_id)


def _pair_dip(g, centre, half_width, sign_out, n=65):
    """Smallest sign_out * g near the merging pair, Brent-polished.

    Negative while the root pair exists, positive once it is gone; its sign
    change in t is the creation/annihilation instant.
    """
    from scipy.optimize import minimize_scalar

    xs = np.linspace(centre - half_width, centre + half_width, n)
    vals = sign_out * np.asarray(g(xs), dtype=float)
    i = int(np.argmin(vals))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, n - 1)]
    res = minimize_scalar(
        lambda x: sign_out * float(np.asarray(g(np.array([x])))[0]),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-13 * max(1.0, abs(centre))},
    )
    return float(res.fun), float(res.x)


def locate_event(
    model,
    point0: PhasePoint,
    d: Dispersion,
    t_bracket: tuple[float, float],
    factor_id=None,
    frame: str = "native",
    opts: RootFindOptions | None = None,
    tol_t: float | None = None,
    pair_hint: tuple[float, float] | None = None,
) -> tuple[float, float, str]:
    """Bisect a +-2 root-count change down to (t_event, x_event, kind).

    ``kind`` is "creation" when the pair exists on the late side of the
    bracket, "annihilation" otherwise.  ``pair_hint`` gives the positions of
    the merging pair on the side where it exists; without it the closest
    same-factor pair on that side is assumed.
    """
    opts = opts or RootFindOptions()
    ta, tb = t_bracket
    sa = snapshot_at(model, point0, d, ta, opts, frame)
    sb = snapshot_at(model, point0, d, tb, opts, frame)
    ca, cb = sa.factor_count(factor_id), sb.factor_count(factor_id)
    if abs(ca - cb) != 2:
        raise CountChangeNot2(
            f"factor {factor_id} count changed {ca}->{cb} on {t_bracket}; shrink dt"
        )
    kind = "creation" if cb > ca else "annihilation"
    rich, lean = (sb, sa) if cb > ca else (sa, sb)

    if pair_hint is not None:
        pair = (min(pair_hint), max(pair_hint))
    else:
        # assume the merging pair is the two closest roots on the rich side
        xs = np.array([rich.entries[i].x for i in rich.factor_indices(factor_id)])
        gaps = np.diff(xs)
        k = int(np.argmin(gaps))
        pair = (xs[k], xs[k + 1])
    centre = 0.5 * (pair[0] + pair[1])
    width = max(
        4.0 * (pair[1] - pair[0]),
        8.0 * (rich.window[1] - rich.window[0]) / opts.n_scan,
    )
    # sign of g just outside the pair
    g_rich = _factor_g(model, point0, d, frame, rich.t, factor_id)
    sign_out = np.sign(float(np.asarray(g_rich(np.array([centre - width])))[0]))
    if sign_out == 0:
        sign_out = 1.0

    tol = tol_t if tol_t is not None else EVENT_TOL_T * max(1.0, abs(ta), abs(tb))

    def dip(t, centre):
        g = _factor_g(model, point0, d, frame, t, factor_id)
        return _pair_dip(g, centre, width, sign_out)

    va, xa = dip(ta, centre)
    vb, xb = dip(tb, centre)
    if va == 0.0:
        return ta, xa, kind
    if vb == 0.0:
        return tb, xb, kind
    # The snapshot count can lag the true pair birth/death by a scan cell,
    # leaving the actual sign change just outside the bracket; widen toward
    # the side where the pair should be absent until the dip flips sign.
    step = tb - ta
    grow = 0
    while va * vb > 0 and grow < 12:
        if kind == "creation":
            ta = ta - step
            va, xa = dip(ta, xa)
        else:
            tb = tb + step
            vb, xb = dip(tb, xb)
        step *= 1.5
        grow += 1
    if va * vb > 0:
        # dip never changed sign: fall back to bisection on root counts
        return _count_bisect(model, point0, d, frame, opts, ta, tb, factor_id, ca, cb, tol, kind)
    x_ev = xa if abs(va) < abs(vb) else xb
    while tb - ta > tol:
        tm = 0.5 * (ta + tb)
        vm, xm = dip(tm, 0.5 * (xa + xb))
        if vm == 0.0:
            return tm, xm, kind
        if vm * va < 0:
            tb, vb, xb = tm, vm, xm
        else:
            ta, va, xa = tm, vm, xm
        x_ev = xm
    return 0.5 * (ta + tb), x_ev, kind


def _count_bisect(model, point0, d, frame, opts, ta, tb, factor_id, ca, cb, tol, kind):
    while tb - ta > tol:
        tm = 0.5 * (ta + tb)
        cm = snapshot_at(model, point0, d, tm, opts, frame).factor_count(factor_id)
        if cm == ca:
            ta = tm
        elif cm == cb:
            tb = tm
        elif abs(cm - ca) == 2:
            # a transient pair intrudes; keep the half with the +-2 change
            tb, cb = tm, cm
        elif abs(cm - cb) == 2:
            ta, ca = tm, cm
        else:
            raise CountChangeNot2(f"intermediate count {cm} between {ca} and {cb}")
    rich_t = tb if cb > ca else ta
    snap = snapshot_at(model, point0, d, rich_t, opts, frame)
    xs = np.array([snap.entries[i].x for i in snap.factor_indices(factor_id)])
    k = int(np.argmin(np.diff(xs))) if len(xs) > 1 else 0
    x_ev = 0.5 * (xs[k] + xs[k + 1]) if len(xs) > 1 else float(xs[0])
    return 0.5 * (ta + tb), x_ev, kind


# --------------------------------------------------------------------------
# assembly
# --------------------------------------------------------------------------

def assemble(
    snapshots: list[RootSnapshot],
    event_locator=None,
    crossing_refiner=None,
    x_tol: float = 1e-9,
) -> tuple[list[WorldLine], list[Event]]:
    """Chain snapshot matchings into world lines and attach events.

    ``event_locator(t_bracket, factor_id, pair_hint)`` refines a count
    change into (t, x, kind); without it events carry bracket-midpoint
    times.  Crossing events between lines of different factors are detected
    from samples and refined by ``crossing_refiner(t_bracket, line_a,
    line_b)`` when given.
    """
    lines: list[WorldLine] = []
    events: list[Event] = []
    if not snapshots:
        return lines, events

    open_map: dict[int, int] = {}
    first = snapshots[0]
    for i, e in enumerate(first.entries):
        line = WorldLine(id=len(lines), factor_id=e.factor_id)
        line.times.append(first.t)
        line.positions.append(e.x)
        lines.append(line)
        open_map[i] = line.id

    for prev, nxt in zip(snapshots[:-1], snapshots[1:]):
        dt = nxt.t - prev.t
        predictions = []
        for i, e in enumerate(prev.entries):
            line = lines[open_map[i]]
            if len(line.times) >= 2 and dt > 0:
                v_est = (line.positions[-1] - line.positions[-2]) / (
                    line.times[-1] - line.times[-2]
                )
            else:
                v_est = 0.0
            predictions.append(e.x + v_est * dt)
        pairs, un_prev, un_next = match_roots(prev, nxt, predictions)

        new_open: dict[int, int] = {}
        for i, j in pairs:
            line = lines[open_map[i]]
            line.times.append(nxt.t)
            line.positions.append(nxt.entries[j].x)
            new_open[j] = line.id

        # per-factor count bookkeeping for events
        factor_ids = {e.factor_id for e in prev.entries} | {
            e.factor_id for e in nxt.entries
        }
        for fid in sorted(factor_ids, key=lambda v: (v is None, v)):
            dead = [i for i in un_prev if prev.entries[i].factor_id == fid]
            born = [j for j in un_next if nxt.entries[j].factor_id == fid]
            if not dead and not born:
                continue
            if len(dead) == 2 and not born:
                ids = tuple(sorted(open_map[i] for i in dead))
                ev = _locate(event_locator, prev, nxt, fid, dead, None, "annihilation", ids)
                events.append(ev)
                for i in dead:
                    lines[open_map[i]].death = ev
            elif len(born) == 2 and not dead:
                new_ids = []
                for j in born:
                    line = WorldLine(id=len(lines), factor_id=fid)
                    line.times.append(nxt.t)
                    line.positions.append(nxt.entries[j].x)
                    lines.append(line)
                    new_open[j] = line.id
                    new_ids.append(line.id)
                ev = _locate(event_locator, prev, nxt, fid, None, born, "creation", tuple(new_ids))
                events.append(ev)
                for lid in new_ids:
                    lines[lid].birth = ev
            else:
                raise CountChangeNot2(
                    f"factor {fid}: {len(dead)} ended, {len(born)} started in one "
                    f"step at t in ({prev.t}, {nxt.t}); shrink dt"
                )
        open_map = new_open

    events.extend(_crossings(lines, crossing_refiner, x_tol))
    events.sort(key=lambda e: e.t)
    return lines, events


def _locate(event_locator, prev, nxt, fid, dead, born, kind, ids) -> Event:
    snap, idxs = (prev, dead) if kind == "annihilation" else (nxt, born)
    xs = [snap.entries[i].x for i in idxs]
    if event_locator is not None:
        t, x, located_kind = event_locator((prev.t, nxt.t), fid, (min(xs), max(xs)))
        return Event(located_kind, t, x, ids)
    return Event(kind, 0.5 * (prev.t + nxt.t), float(np.mean(xs)), ids)


def _crossings(lines, crossing_refiner, x_tol) -> list[Event]:
    out = []
    for a_i in range(len(lines)):
        for b_i in range(a_i + 1, len(lines)):
            la, lb = lines[a_i], lines[b_i]
            if la.factor_id == lb.factor_id:
                continue
            lo = max(la.t0, lb.t0)
            hi = min(la.t1, lb.t1)
            if not lo < hi:
                continue
            ts = np.array(sorted(set(t for t in la.times + lb.times if lo <= t <= hi)))
            if len(ts) < 2:
                continue
            da = np.array([la.position_at(t) for t in ts])
            db = np.array([lb.position_at(t) for t in ts])
            diff = da - db
            for k in np.nonzero(diff[:-1] * diff[1:] <= 0)[0]:
                if diff[k] == 0 and (k > 0 and diff[k - 1] * diff[k + 1] > 0):
                    continue  # grazing sample, no actual crossing
                t_lo, t_hi = float(ts[k]), float(ts[k + 1])
                if crossing_refiner is not None:
                    t_ev, x_ev = crossing_refiner((t_lo, t_hi), la, lb)
                else:
                    # linear interpolation of the sign change
                    w = diff[k] / (diff[k] - diff[k + 1]) if diff[k] != diff[k + 1] else 0.5
                    t_ev = t_lo + w * (t_hi - t_lo)
                    x_ev = float(la.position_at(t_ev))
                out.append(Event("crossing", t_ev, x_ev, (la.id, lb.id)))
    return out


# --------------------------------------------------------------------------
# high-level driver
# --------------------------------------------------------------------------

def track(
    model,
    point0: PhasePoint,
    d: Dispersion | None = None,
    t_grid: tuple[float, float, float] = (0.0, 1.0, 0.05),
    opts: RootFindOptions | None = None,
    frame: str = "native",
    locate_events: bool = True,
    refine_crossings: bool = True,
) -> Trajectory:
    """Simulate, assemble, and localize events in one call."""
    d = d or _models.default_dispersion(model)
    opts = opts or RootFindOptions()
    snapshots = simulate(model, point0, d, t_grid, opts, frame)

    locator = None
    if locate_events:
        def locator(bracket, fid, pair_hint=None):
            return locate_event(
                model, point0, d, bracket, fid, frame, opts, pair_hint=pair_hint
            )

    refiner = None
    if refine_crossings:
        def refiner(bracket, la, lb):
            return _refine_crossing(model, point0, d, frame, opts, bracket, la, lb)

    lines, events = assemble(snapshots, locator, refiner)
    return Trajectory(model, point0, d, frame, snapshots, lines, events)


def _refine_crossing(model, point0, d, frame, opts, bracket, la, lb, tol_t=None):
    """Bisect the signed separation of two lines of different factors."""
    ta, tb = bracket
    tol = tol_t if tol_t is not None else EVENT_TOL_T * max(1.0, abs(ta), abs(tb))

    def sep(t):
        snap = snapshot_at(model, point0, d, t, opts, frame)
        xa = _nearest_root(snap, la.factor_id, la.position_at(t))
        xb = _nearest_root(snap, lb.factor_id, lb.position_at(t))
        return xa - xb, 0.5 * (xa + xb)

    va, xa = sep(ta)
    vb, xb = sep(tb)
    if va == 0.0:
        return ta, xa
    if vb == 0.0:
        return tb, xb
    if va * vb > 0:
        return 0.5 * (ta + tb), 0.5 * (xa + xb)
    while tb - ta > tol:
        tm = 0.5 * (ta + tb)
        vm, xm = sep(tm)
        if vm == 0.0:
            return tm, xm
        if vm * va < 0:
            tb, vb = tm, vm
        else:
            ta, va = tm, vm
    tm = 0.5 * (ta + tb)
    return tm, sep(tm)[1]


def _nearest_root(snap: RootSnapshot, factor_id, x_ref: float) -> float:
    xs = np.array([snap.entries[i].x for i in snap.factor_indices(factor_id)])
    if len(xs) == 0:
        return x_ref
    return float(xs[np.argmin(np.abs(xs - x_ref))])
