"""Inverse map of the induced system: positions and velocities -> (q, p).

The defining equations are f(q - x_i e, p) = 0 together with the chain-rule
identity sum_j (h'(p_j) - v_i) df/dq_j = 0 at every root, a square system of
2N real equations once a conjugation ansatz fixes which entries are real and
which form pairs.  Closed forms exist for the two-particle polynomial and
sinh models; everything else goes through a damped Newton iteration over an
enumeration of single-pair ansatze.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import models as _models
from .errors import (
    AmbiguousBranch,
    BranchPoint,
    DomainError,
    NoConvergence,
    VanishingDenominator,
    ZeroQ12,
    ZeroSeparation,
    ZerodynError,
)
from .phase_space import Dispersion, PhasePoint, evolve, validate
from .rootfind import RootFindOptions, find_real_roots


@dataclass(frozen=True)
class CauchyData:
    """Initial positions (strictly increasing) and velocities at t_ref."""

    x: np.ndarray
    v: np.ndarray
    t_ref: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "v", np.atleast_1d(np.asarray(self.v, dtype=float)))
        if len(self.x) != len(self.v):
            raise ValueError("x and v must have equal length")
        if np.any(np.diff(self.x) <= 0):
            raise ValueError("positions must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.x)


# --------------------------------------------------------------------------
# the (i4)/(i5)-style residual and derived quantities
# --------------------------------------------------------------------------

def _grads_at_roots(model, q, p, eps, xs) -> np.ndarray:
    """df/dq_j at (q - x_i e, p) for every root x_i; shape (len(xs), n)."""
    return np.array(
        [_models.generating_grad_q(model, q, p, eps, float(x)) for x in xs]
    )


def residual_system(model, d: Dispersion, point: PhasePoint, data: CauchyData) -> np.ndarray:
    """2N real residuals: f at every x_i, then the velocity identities."""
    return _residual_raw(model, d, point.q, point.p, point.epsilon, data.x, data.v)


def _residual_raw(model, d, q, p, eps, xs, vs) -> np.ndarray:
    fvals = _models.generating_values(model, q, p, eps, xs)
    grads = _grads_at_roots(model, q, p, eps, xs)
    hp = d.velocity(p)
    vel = (hp[None, :] - vs[:, None]) * grads
    return np.concatenate([fvals.real, np.sum(vel, axis=1).real])


def implied_velocities(model, point: PhasePoint, d: Dispersion, roots) -> np.ndarray:
    """Root velocities from the chain rule: sum h' df/dq / sum df/dq."""
    roots = np.atleast_1d(np.asarray(roots, dtype=float))
    grads = _grads_at_roots(model, point.q, point.p, point.epsilon, roots)
    hp = d.velocity(point.p)
    num = grads @ hp
    den = np.sum(grads, axis=1)
    if np.any(np.abs(den) == 0):
        raise VanishingDenominator("df/dq sums to zero at a root")
    return (num / den).real


def acceleration_from_implicit(model, d: Dispersion, point: PhasePoint, x_i: float, v_i: float) -> float:
    """Second time derivative of a root from the implicit function theorem.

    d2/dt2 f(q(t) - x_i(t) e, p) = 0 solved for the root acceleration; both
    velocity factors carry the same root velocity v_i.
    """
    q, p, eps = point.q, point.p, point.epsilon
    grads = _models.generating_grad_q(model, q, p, eps, x_i)
    hess = _models.generating_hess_q(model, q, p, eps, x_i)
    hp = d.velocity(p)
    w = hp - v_i
    num = w @ hess @ w
    den = np.sum(grads)
    if abs(den) < 1e-300:
        raise VanishingDenominator("df/dq sums to zero at the root")
    return float((num / den).real)


# --------------------------------------------------------------------------
# closed forms (two-particle polynomial and sinh models)
# --------------------------------------------------------------------------

def cauchy_polynomial_pair(C: float, data: CauchyData) -> PhasePoint:
    """Closed-form inversion for f = (q1 - x)(q2 - x) - C/4.

    Sum maps identically; the difference obeys x12^2 = q12^2 + C.  The real
    branch takes sign(q12) = sign(x12); the imaginary branch fixes
    q12 = +i |q12|.
    """
    if data.n != 2:
        raise ValueError("polynomial pair closed form needs N = 2")
    x12 = data.x[0] - data.x[1]
    v12 = data.v[0] - data.v[1]
    if x12 == 0:
        raise ZeroSeparation("coincident positions")
    disc = x12 * x12 - C
    if disc == 0:
        raise ZeroQ12("data sit exactly on a creation/annihilation event")
    if disc > 0:
        q12 = np.sign(x12) * np.sqrt(disc)
    else:
        q12 = 1j * np.sqrt(-disc)
    p12 = v12 * x12 / q12
    q_sum = data.x[0] + data.x[1]
    p_sum = data.v[0] + data.v[1]
    q = np.array([(q_sum + q12) / 2, (q_sum - q12) / 2])
    p = np.array([(p_sum + p12) / 2, (p_sum - p12) / 2])
    pairs = [] if disc > 0 else [(0, 1)]
    point = PhasePoint.paired(q, p, pairs=pairs)
    validate(point)
    return point


def cauchy_sinh_pair(C: float, data: CauchyData) -> PhasePoint:
    """Closed-form inversion for f = sinh(q1 - x) sinh(q2 - x) - C.

    The difference obeys cosh x12 = cosh q12 + 2C and the momenta follow
    from sinh(x12) v12 = sinh(q12) p12.
    """
    if data.n != 2:
        raise ValueError("sinh pair closed form needs N = 2")
    x12 = data.x[0] - data.x[1]
    v12 = data.v[0] - data.v[1]
    if x12 == 0:
        raise ZeroSeparation("coincident positions")
    k = np.cosh(x12) - 2.0 * C
    if abs(k - 1.0) < 1e-13 or abs(k + 1.0) < 1e-13:
        raise BranchPoint("cosh x12 - 2C at a branch point of arccosh")
    if k < -1.0:
        raise DomainError("no admissible phase point: cosh q12 < -1 required")
    if k > 1.0:
        q12 = np.sign(x12) * np.arccosh(k)
    else:
        q12 = 1j * np.arccos(k)
    p12 = np.sinh(x12) * v12 / np.sinh(q12)
    q_sum = data.x[0] + data.x[1]
    p_sum = data.v[0] + data.v[1]
    q = np.array([(q_sum + q12) / 2, (q_sum - q12) / 2])
    p = np.array([(p_sum + p12) / 2, (p_sum - p12) / 2])
    pairs = [] if k > 1.0 else [(0, 1)]
    point = PhasePoint.paired(q, p, pairs=pairs)
    validate(point)
    return point


# --------------------------------------------------------------------------
# the general Newton solve
# --------------------------------------------------------------------------

class _Ansatz:
    """Real parameterization of (q, p) under one conjugation pattern."""

    def __init__(self, n: int, pairs):
        self.n = n
        self.pairs = [tuple(sorted(pr)) for pr in pairs]
        in_pair = {i for pr in self.pairs for i in pr}
        self.fixed = [i for i in range(n) if i not in in_pair]

    @property
    def dim(self) -> int:
        return 2 * self.n

    def pairing(self) -> np.ndarray:
        sigma = np.arange(self.n)
        for i, j in self.pairs:
            sigma[i], sigma[j] = j, i
        return sigma

    def pack(self, q, p) -> np.ndarray:
        theta = []
        for i in self.fixed:
            theta += [q[i].real, p[i].real]
        for i, j in self.pairs:
            theta += [q[i].real, q[i].imag, p[i].real, p[i].imag]
        return np.array(theta)

    def unpack(self, theta) -> tuple[np.ndarray, np.ndarray]:
        q = np.zeros(self.n, dtype=complex)
        p = np.zeros(self.n, dtype=complex)
        k = 0
        for i in self.fixed:
            q[i], p[i] = theta[k], theta[k + 1]
            k += 2
        for i, j in self.pairs:
            q[i] = theta[k] + 1j * theta[k + 1]
            p[i] = theta[k + 2] + 1j * theta[k + 3]
            q[j] = q[i].conjugate()
            p[j] = p[i].conjugate()
            k += 4
        return q, p


def _real_momentum(d: Dispersion, v: float):
    """A real p with h'(p) = v, honoring Re p > 0 branches; None if impossible."""
    if d.name == "quadratic":
        return v
    if d.name == "cubic":
        return np.sqrt(v) if v > 0 else None
    if d.name == "inverse":
        return 1.0 / np.sqrt(-v) if v < 0 else None
    raise ValueError(d.name)


def _initial_guesses(model, d, data, eps):
    """(ansatz, theta0) candidates: all-real first, then single-pair patterns."""
    n = data.n
    out = []
    if model.kind in ("characteristic_cm", "characteristic_rs"):
        try:
            out.append(_characteristic_guess(model, data))
        except (np.linalg.LinAlgError, ZerodynError):
            pass
    p_real = [_real_momentum(d, v) for v in data.v]
    if all(pi is not None for pi in p_real):
        a = _Ansatz(n, [])
        out.append((a, a.pack(np.array(data.x, dtype=complex), np.array(p_real, dtype=complex))))

    v_mag = max(1.0, float(np.max(np.abs(data.v))))
    for i, j in itertools.combinations(range(n), 2):
        if eps is not None and eps[i] != eps[j]:
            continue
        rest = [k for k in range(n) if k not in (i, j)]
        rest_p = [_real_momentum(d, data.v[k]) for k in rest]
        if any(pk is None for pk in rest_p):
            continue
        a = _Ansatz(n, [(i, j)])
        mid = 0.5 * (data.x[i] + data.x[j])
        half = 0.5 * abs(data.x[j] - data.x[i])
        v_mean = 0.5 * (data.v[i] + data.v[j])
        for dq in (half, 0.3 * half + 0.1):
            for dp_scale in (0.3, 1.0):
                for dp_sign in (+1.0, -1.0):
                    dp = dp_sign * dp_scale * v_mag
                    p_pair = _pair_momentum_guess(d, v_mean, dp)
                    if p_pair is None:
                        continue
                    q = np.zeros(n, dtype=complex)
                    p = np.zeros(n, dtype=complex)
                    for k, pk in zip(rest, rest_p):
                        q[k], p[k] = data.x[k], pk
                    q[i] = mid + 1j * dq
                    q[j] = q[i].conjugate()
                    p[i] = p_pair
                    p[j] = p_pair.conjugate()
                    out.append((a, a.pack(q, p)))
    return out


def _characteristic_guess(model, data: CauchyData):
    """Spectral inversion for the characteristic models.

    The pencils diag(x) + t L and diag(q(t)) + W share their characteristic
    polynomial for every t, so the momenta are the eigenvalues of
    L = diag(v) + V(x, v) and the constants a_i are the diagonal of diag(x)
    in L's eigenbasis (the t -> infinity asymptote of the eigenvalues).
    """
    from .oracles import build_L

    kind = "cm" if model.kind == "characteristic_cm" else "rs"
    ell = build_L(kind, data.x, data.v, model.gamma)
    pvals, u = np.linalg.eig(ell)
    m = np.linalg.solve(u, np.diag(data.x).astype(complex) @ u)
    avals = np.diag(m)
    # group into real entries and conjugate pairs
    order = np.argsort(pvals.real + 1e-9 * pvals.imag)
    pvals, avals = pvals[order], avals[order]
    n = len(pvals)
    pairs = []
    used = set()
    for i in range(n):
        if i in used or abs(pvals[i].imag) < 1e-10:
            continue
        for j in range(i + 1, n):
            if j not in used and abs(pvals[j] - pvals[i].conjugate()) < 1e-8 * max(
                1.0, abs(pvals[i])
            ):
                pairs.append((i, j))
                used.update((i, j))
                break
    ansatz = _Ansatz(n, pairs)
    # symmetrize tiny pairing violations before packing
    q = np.array(avals, dtype=complex)
    p = np.array(pvals, dtype=complex)
    for i, j in pairs:
        q[i] = 0.5 * (q[i] + q[j].conjugate())
        q[j] = q[i].conjugate()
        p[i] = 0.5 * (p[i] + p[j].conjugate())
        p[j] = p[i].conjugate()
    fixed = [i for i in range(n) if not any(i in pr for pr in pairs)]
    q[fixed] = q[fixed].real
    p[fixed] = p[fixed].real
    return ansatz, ansatz.pack(q, p)


def _pair_momentum_guess(d: Dispersion, v_mean: float, dp: float):
    """Complex momentum whose velocity roughly matches the pair's mean."""
    if d.name == "quadratic":
        return complex(v_mean, dp)
    if d.name == "cubic":
        # h' = p^2; want Re p > 0 and Re(p^2) near v_mean
        re = np.sqrt(max(v_mean + dp * dp, 0.05))
        return complex(re, dp)
    if d.name == "inverse":
        # h' = -1/p^2; want Re p > 0
        mag = (1.0 / max(abs(v_mean), 0.05)) ** 0.25
        return mag * np.exp(1j * np.clip(dp, -1.2, 1.2) / 2.0)
    raise ValueError(d.name)


def _newton(model, d, data, eps, ansatz, theta0, max_iter=80):
    theta = np.array(theta0, dtype=float)

    def res(th):
        q, p = ansatz.unpack(th)
        return _residual_raw(model, d, q, p, eps, data.x, data.v)

    r = res(theta)
    norm = np.max(np.abs(r))
    for _ in range(max_iter):
        if not np.all(np.isfinite(r)):
            return None
        if norm < 1e-14:
            break
        jac = np.empty((len(r), len(theta)))
        for k in range(len(theta)):
            h = 1e-7 * max(1.0, abs(theta[k]))
            tp = theta.copy()
            tp[k] += h
            tm = theta.copy()
            tm[k] -= h
            jac[:, k] = (res(tp) - res(tm)) / (2 * h)
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        lam = 1.0
        improved = False
        while lam >= 2.0 ** -20:
            r_new = res(theta + lam * step)
            norm_new = np.max(np.abs(r_new))
            if np.all(np.isfinite(r_new)) and norm_new < norm:
                theta = theta + lam * step
                r, norm = r_new, norm_new
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
    q, p = ansatz.unpack(theta)
    return PhasePoint(q, p, eps, ansatz.pairing()), norm


_VALIDATE_OPTS = RootFindOptions(n_scan=512)


def _roundtrip_ok(model, d, data, point, x_tol=5e-10, v_tol=5e-9):
    try:
        validate(point, model)
        rs = find_real_roots(model, point, _VALIDATE_OPTS)
    except ZerodynError:
        return False
    if rs.count != data.n:
        return False
    roots = rs.roots
    if np.max(np.abs(roots - data.x)) > x_tol * max(1.0, np.max(np.abs(data.x))):
        return False
    try:
        vels = implied_velocities(model, point, d, roots)
    except ZerodynError:
        return False
    return np.max(np.abs(vels - data.v)) <= v_tol * max(1.0, np.max(np.abs(data.v)))


def _same_trajectory(model, d, a: PhasePoint, b: PhasePoint, probe=0.37, tol=1e-7) -> bool:
    for t in (probe, -1.3 * probe):
        ra = find_real_roots(model, evolve(a, d, t))
        rb = find_real_roots(model, evolve(b, d, t))
        if ra.count != rb.count:
            return False
        if ra.count and np.max(np.abs(ra.roots - rb.roots)) > tol:
            return False
    return True


def solve_cauchy(
    model, d: Dispersion, data: CauchyData, epsilon=None, probe_ambiguity: bool = False
) -> PhasePoint:
    """Recover the phase point reproducing (x, v) at the data's instant.

    For the determinant models the discrete sign sector is not recoverable
    from one-instant data and must be supplied via ``epsilon`` (defaults to
    all +1).  Raises NoConvergence with the best residual seen when no
    ansatz converges.  With ``probe_ambiguity`` the full ansatz list is
    searched and inequivalent phase points (different induced futures)
    raise AmbiguousBranch carrying every candidate.
    """
    n = data.n
    if epsilon is None:
        eps = np.ones(n)
    else:
        eps = np.atleast_1d(np.asarray(epsilon, dtype=float))

    solutions = []
    for closed_form, wants in (
        (cauchy_polynomial_pair, model.kind == "polynomial_product" and n == 2
         and model.effective_c == model.C / 4.0),
        (cauchy_sinh_pair, model.kind == "sinh_pair"),
    ):
        if wants:
            try:
                pt = closed_form(model.C, data)
                if _roundtrip_ok(model, d, data, pt):
                    solutions.append(pt)
            except ZerodynError:
                pass

    best_norm = np.inf
    if not solutions or probe_ambiguity:
        for ansatz, theta0 in _initial_guesses(model, d, data, eps):
            result = _newton(model, d, data, eps, ansatz, theta0)
            if result is None:
                continue
            point, norm = result
            best_norm = min(best_norm, norm)
            if _roundtrip_ok(model, d, data, point):
                solutions.append(point)
                if not probe_ambiguity:
                    break
    if not solutions:
        raise NoConvergence(
            f"no conjugation ansatz converged for {model.kind}; best residual {best_norm:.3e}"
        )
    kept = [solutions[0]]
    for pt in solutions[1:]:
        if not any(_same_trajectory(model, d, pt, other) for other in kept):
            kept.append(pt)
    if len(kept) > 1:
        raise AmbiguousBranch(
            f"{len(kept)} inequivalent phase points fit the data", candidates=kept
        )
    return kept[0]
