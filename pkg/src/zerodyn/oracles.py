"""Independent cross-checks: closed forms, equations of motion, projection.

Everything here deliberately avoids the tracking pipeline it is meant to
check: trajectories come from explicit formulas, spectra of position/velocity
matrices, or finite differences of re-simulated roots.

Two printed equations of the source material fail direct numerical
validation and are implemented in re-derived form (see the sinh-pair and
relativistic sinh-Gordon residuals): re-deriving them from the worldline
relations reproduces tracked dynamics to discretization accuracy, while the
printed coefficients do not, under any reinterpretation tried.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import models as _models
from .cauchy import CauchyData, implied_velocities
from .errors import (
    BoundaryCase,
    CoincidentPositions,
    DegenerateData,
    DomainError,
    EventInWindow,
    RSPoleAtGamma,
    SingularConfiguration,
)
from .phase_space import Dispersion, PhasePoint, evolve, lorentz_boost
from .rootfind import RootFindOptions, RootSet, RootRecord, find_real_roots, refine, scan_brackets
from .tracker import Trajectory, snapshot_at

__all__ = [
    "Trajectory",
    "polynomial_pair_closed_form",
    "residual_eom",
    "build_L",
    "projection_roots",
    "conjugate_momenta",
    "induced_hamiltonian",
    "asymptotic_check",
    "boost_covariance_check",
    "cone_to_lab",
    "regime_classify",
    "probe_state",
    "periodicity",
]


# --------------------------------------------------------------------------
# closed-form polynomial pair trajectory
# --------------------------------------------------------------------------

def polynomial_pair_closed_form(C: float, data: CauchyData, t):
    """Exact sum and squared difference of the two-particle polynomial model.

    sum(t) = x1 + x2 + (v1 + v2) t and
    x12^2(t) = (x12 + v12 t)^2 + C (v12 t)^2 / (x12^2 - C);
    roots exist at time t iff x12^2(t) >= 0.
    """
    if data.n != 2:
        raise ValueError("closed form needs N = 2")
    x12 = data.x[0] - data.x[1]
    v12 = data.v[0] - data.v[1]
    disc = x12 * x12 - C
    if disc == 0:
        raise DegenerateData("x12^2 = C exactly")
    t = np.asarray(t, dtype=float)
    s = data.x[0] + data.x[1] + (data.v[0] + data.v[1]) * t
    x12_sq = (x12 + v12 * t) ** 2 + C * (v12 * t) ** 2 / disc
    return s, x12_sq


def polynomial_pair_event_times(C: float, data: CauchyData):
    """Zeros of the closed-form x12^2(t): the creation/annihilation instants."""
    x12 = data.x[0] - data.x[1]
    v12 = data.v[0] - data.v[1]
    disc = x12 * x12 - C
    if disc == 0:
        raise DegenerateData("x12^2 = C exactly")
    # quadratic a t^2 + b t + c from expanding the closed form
    a = v12 * v12 * (1.0 + C / disc)
    b = 2.0 * x12 * v12
    c = x12 * x12
    if a == 0:
        return np.array([])
    rad = b * b - 4 * a * c
    if rad < 0:
        return np.array([])
    r = np.sqrt(rad)
    return np.sort(np.array([(-b - r) / (2 * a), (-b + r) / (2 * a)]))


# --------------------------------------------------------------------------
# equations of motion as residuals
# --------------------------------------------------------------------------

def residual_eom(kind: str, x, v, a, *, C: float | None = None, label: int = 1) -> float:
    """|LHS - RHS| of the closed-form two-particle equation of motion.

    ``x, v, a`` are the positions, velocities and accelerations of both
    particles in the equation's own parameterization (lab time, or the cone
    evolution parameter for the relativistic pair).  ``label`` is the +-1
    case switch of the relativistic sinh-Gordon equation (+1 repulsion,
    -1 attraction/bound pair).
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    x12, v12, a12 = x[0] - x[1], v[0] - v[1], a[0] - a[1]

    if kind == "polynomial_pair":
        if x12 == 0 or x12 * x12 == C:
            raise DomainError("singular configuration")
        rhs = C * v12 * v12 / (x12 * (x12 * x12 - C))
        return max(abs(a[0] + a[1]), abs(a12 - rhs))

    if kind == "sinh_pair":
        c = np.cosh(x12)
        denom = np.sinh(x12) * ((c - 2 * C) ** 2 - 1.0)
        if denom == 0:
            raise DomainError("singular configuration")
        # re-derived sign: the difference acceleration is +2C(...), i.e. the
        # per-particle sign alternates as (-1)^(j+1)
        rhs = 2.0 * C * v12 * v12 * (c * c - 2 * C * c + 1.0) / denom
        return max(abs(a[0] + a[1]), abs(a12 - rhs))

    if kind == "relativistic_pair":
        d12 = x12
        denom = 2.0 * d12 * (d12 * d12 + C * (v[0] + v[1]))
        if denom == 0:
            raise DomainError("singular configuration")
        out = 0.0
        for i in (0, 1):
            rhs = ((-1) ** (i + 1)) * C * v12 * v12 * (v[0] + v[1]) / denom
            out = max(out, abs(a[i] - rhs))
        return out

    if kind == "sg_pair":
        s_sq = 4.0 - v12 * v12
        if s_sq <= 0:
            raise DomainError("relative speed at or beyond the light cone")
        s = np.sqrt(s_sq)
        r = a12 * np.sign(x12) / s
        if r + 4.0 < 0:
            raise DomainError("acceleration outside the admissible branch")
        theta = (4.0 * abs(x12) / s) * np.sqrt(4.0 + r)
        denom = np.cosh(theta) - label
        if denom == 0:
            raise DomainError("bound-state denominator vanished")
        return abs(r - 8.0 * label / denom)

    raise ValueError(f"unknown equation kind {kind!r}")


# --------------------------------------------------------------------------
# projection method for the characteristic models
# --------------------------------------------------------------------------

def build_L(kind: str, x, v, gamma: float) -> np.ndarray:
    """Position-space velocity matrix diag(v) + V of the projection method."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    n = len(x)
    diff = x[None, :] - x[:, None]  # entry (j, k) = x_k - x_j
    off = ~np.eye(n, dtype=bool)
    if np.any(diff[off] == 0):
        raise CoincidentPositions("coinciding positions in L")
    ell = np.diag(v).astype(float)
    if kind == "cm":
        ell[off] += gamma / diff[off]
    elif kind == "rs":
        denom = diff + gamma
        if np.any(denom[off] == 0):
            raise RSPoleAtGamma("x_k - x_j = -gamma pole in L")
        num = np.broadcast_to(gamma * v[None, :], (n, n))
        ell[off] += num[off] / denom[off]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return ell


def projection_roots(X0: np.ndarray, L0: np.ndarray, t: float, opts: RootFindOptions | None = None) -> np.ndarray:
    """Real eigenvalue-style roots of det(X0 + t L0 - x I) via scanning."""
    opts = opts or RootFindOptions()
    m = np.asarray(X0, dtype=float) + t * np.asarray(L0, dtype=float)
    n = m.shape[0]

    def g(xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        a = np.broadcast_to(m, (len(xs), n, n)).copy()
        idx = np.arange(n)
        a[:, idx, idx] -= xs[:, None]
        return np.linalg.det(a)

    centre = np.diag(m)
    radius = np.sum(np.abs(m), axis=1) - np.abs(centre)
    window = (
        float(np.min(centre - radius) - 1.0),
        float(np.max(centre + radius) + 1.0),
    )
    brackets, zeros, _ = scan_brackets(g, window, opts.n_scan)
    roots = [refine(g, None, br, opts) for br in brackets]
    return np.array(sorted(roots + zeros))


# --------------------------------------------------------------------------
# Lagrangian structure of the polynomial pair
# --------------------------------------------------------------------------

def conjugate_momenta(x, v, C: float) -> np.ndarray:
    """Momenta conjugate to the polynomial-pair positions.

    Undefined on the manifold x12^2 = C (the pair's turning point), where
    the canonical transformation to the free variables degenerates.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    x12 = x[0] - x[1]
    v12 = v[0] - v[1]
    scale = max(1.0, abs(C))
    if x12 == 0 or abs(x12 * x12 - C) <= 1e-12 * scale:
        raise SingularConfiguration("conjugate momenta undefined here")
    corr = C * v12 / (2.0 * (x12 * x12 - C))
    return np.array([v[0] + corr, v[1] - corr])


def induced_hamiltonian(x, P, C: float) -> float:
    """Energy of the induced pair in its own canonical variables."""
    x = np.asarray(x, dtype=float)
    P = np.asarray(P, dtype=float)
    x12 = x[0] - x[1]
    if x12 == 0:
        raise SingularConfiguration("coincident positions")
    return float(0.5 * (P[0] ** 2 + P[1] ** 2) - C * (P[0] - P[1]) ** 2 / (4.0 * x12 * x12))


# --------------------------------------------------------------------------
# asymptotics, boosts, cone variables
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayReport:
    times: tuple[float, ...]
    residuals: tuple[float, ...]
    ratios: tuple[float, ...]


def asymptotic_check(
    model,
    point: PhasePoint,
    d: Dispersion,
    times=(-100.0, -200.0, -400.0),
    opts: RootFindOptions | None = None,
) -> DecayReport:
    """Distance of roots from their free asymptotes a_i + h'(p_i) t.

    Every probe time must show the full complement of roots (otherwise an
    event sits in the window) and each residual halves when |t| doubles for
    the O(1/t) approach the characteristic models exhibit.
    """
    lines_a = point.q.real
    lines_v = d.velocity(point.p).real
    residuals = []
    for t in times:
        snap = snapshot_at(model, point, d, t, opts)
        if snap.count != point.n:
            raise EventInWindow(f"{snap.count} roots at t={t}, expected {point.n}")
        predicted = lines_a + lines_v * t
        xs = np.array([e.x for e in snap.entries])
        # roots and asymptotes match one-to-one by proximity
        dist = np.abs(xs[:, None] - predicted[None, :])
        residuals.append(float(np.max(np.min(dist, axis=1))))
    ratios = tuple(
        residuals[i] / residuals[i + 1] if residuals[i + 1] != 0 else np.inf
        for i in range(len(residuals) - 1)
    )
    return DecayReport(tuple(times), tuple(residuals), ratios)


def boost_covariance_check(
    model,
    point: PhasePoint,
    d: Dispersion,
    lam: float,
    etas=(-2.0, -0.5, 0.0, 0.7, 1.9),
    opts: RootFindOptions | None = None,
) -> float:
    """Max |roots(boosted at eta/lam) - lam * roots(original at eta)|."""
    boosted = lorentz_boost(point, lam)
    worst = 0.0
    for eta in etas:
        base = find_real_roots(model, evolve(point, d, eta), opts).roots
        scaled = find_real_roots(model, evolve(boosted, d, eta / lam), opts).roots
        if len(base) != len(scaled):
            raise EventInWindow(f"root count changed under boost at eta={eta}")
        if len(base):
            worst = max(worst, float(np.max(np.abs(scaled - lam * base))))
    return worst


def cone_to_lab(xi, eta):
    """Invert xi = x + t, eta = x - t."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return (xi + eta) / 2.0, (xi - eta) / 2.0


# --------------------------------------------------------------------------
# regimes
# --------------------------------------------------------------------------

REPULSION = "repulsion"
FINITE_LIFE = "finite_life"
CHESHIRIZATION = "cheshirization"
OSCILLATION = "oscillation"
VIRTUAL_CASCADE = "virtual_cascade"


def regime_classify(model, state) -> str:
    """Predict the event structure of a two-particle run from its data.

    ``state`` is either a PhasePoint or CauchyData.  Exact boundary values
    raise BoundaryCase rather than guessing.
    """
    kind = model.kind
    if kind == "polynomial_product":
        C = model.C if model.effective_c == model.C / 4.0 else 4.0 * model.effective_c
        q12_sq = _pair_q12_squared(model, state, C)
        if C == 0 or q12_sq == 0:
            raise BoundaryCase("C = 0 or data on an event")
        if C < 0:
            return CHESHIRIZATION
        return REPULSION if q12_sq > 0 else FINITE_LIFE

    if kind == "relativistic_pair":
        C = model.C
        if isinstance(state, CauchyData):
            x12 = state.x[0] - state.x[1]
            q12_sq = x12 * x12 + C * (state.v[0] + state.v[1])
        else:
            q12 = state.q[0] - state.q[1]
            q12_sq = (q12 * q12).real
        if C == 0 or q12_sq == 0:
            raise BoundaryCase("C = 0 or data on an event")
        if C < 0:
            return CHESHIRIZATION
        return REPULSION if q12_sq > 0 else FINITE_LIFE

    if kind == "sinh_pair":
        C = model.C
        if isinstance(state, CauchyData):
            k = np.cosh(state.x[0] - state.x[1]) - 2.0 * C
        else:
            k = float(np.cosh(state.q[0] - state.q[1]).real)
        if C == 0 or C == 1 or abs(k) == 1:
            raise BoundaryCase("data on a regime boundary")
        if C < 0:
            return CHESHIRIZATION
        if k > 1:
            return REPULSION
        if k < -1:
            raise BoundaryCase("no admissible phase point")
        return OSCILLATION if C > 1 else VIRTUAL_CASCADE

    raise ValueError(f"no regime table for {kind!r}")


def _pair_q12_squared(model, state, C):
    if isinstance(state, CauchyData):
        x12 = state.x[0] - state.x[1]
        return x12 * x12 - C
    q12 = state.q[0] - state.q[1]
    return (q12 * q12).real


def predicted_events(regime: str) -> dict:
    """Event structure each regime implies on a window covering the events."""
    return {
        REPULSION: {"creation": 0, "annihilation": 0, "recurring": False},
        FINITE_LIFE: {"creation": 1, "annihilation": 1, "recurring": False},
        CHESHIRIZATION: {"creation": 1, "annihilation": 1, "recurring": False},
        OSCILLATION: {"creation": 0, "annihilation": 0, "recurring": False},
        VIRTUAL_CASCADE: {"creation": 2, "annihilation": 2, "recurring": True},
    }[regime]


# --------------------------------------------------------------------------
# finite-difference probes along trajectories
# --------------------------------------------------------------------------

def probe_state(
    model,
    point0: PhasePoint,
    d: Dispersion,
    t: float,
    dt: float = 1e-3,
    frame: str = "native",
    opts: RootFindOptions | None = None,
):
    """(x, v, a) of every root at time t from 5-point central differences.

    Roots are re-found at the five stencil times and chained to the centre
    snapshot by proximity, so the estimate never trusts the implicit-form
    acceleration it is used to validate.
    """
    stencil = [snapshot_at(model, point0, d, t + k * dt, opts, frame) for k in range(-2, 3)]
    counts = {s.count for s in stencil}
    if len(counts) != 1:
        raise EventInWindow(f"root count changes inside the stencil at t={t}")
    n = stencil[0].count
    centre = np.array([e.x for e in stencil[2].entries])
    cols = np.empty((5, n))
    for si, s in enumerate(stencil):
        xs = np.array([e.x for e in s.entries])
        for j in range(n):
            cols[si, j] = xs[np.argmin(np.abs(xs - centre[j]))]
    v = (cols[0] - 8 * cols[1] + 8 * cols[3] - cols[4]) / (12 * dt)
    a = (-cols[0] + 16 * cols[1] - 30 * cols[2] + 16 * cols[3] - cols[4]) / (12 * dt * dt)
    return centre, v, a


def periodicity(ts, xs) -> tuple[float, float]:
    """(period, peak correlation) of a uniformly resampled scalar signal."""
    ts = np.asarray(ts, dtype=float)
    xs = np.asarray(xs, dtype=float)
    n = 1024
    tu = np.linspace(ts[0], ts[-1], n)
    xu = np.interp(tu, ts, xs)
    xu = xu - np.mean(xu)
    denom = float(np.dot(xu, xu))
    if denom == 0:
        return np.inf, 0.0
    corr = np.correlate(xu, xu, mode="full")[n - 1 :] / denom
    # first local maximum after the zero-lag peak decays
    k = 1
    while k < n - 1 and corr[k] > corr[k + 1]:
        k += 1
    seg = corr[k:]
    if len(seg) == 0:
        return np.inf, 0.0
    peak = int(np.argmax(seg)) + k
    dt = tu[1] - tu[0]
    return float(peak * dt), float(corr[peak])
