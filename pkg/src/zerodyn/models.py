"""Generating-function families f(q, p) and their shifted evaluations.

Every model evaluates f(q - x e, p) for real x, together with x-derivatives
and partial derivatives in q needed by the inverse (Cauchy) map.  Zeros in x
of this scalar function are the particle positions of the induced system.

Value conventions: for the soliton determinant models the returned value is
the determinant with every row positively rescaled (exponent-space), which
multiplies f by a positive factor.  Zero sets and signs are exact; absolute
magnitudes are not meaningful for those models.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateMomenta,
    InvalidPoint,
    NotFactorizable,
    NumericalOverflow,
    ZeroMomentum,
)
from .phase_space import CUBIC, INVERSE, QUADRATIC, PhasePoint, validate
from .errors import ZerodynError

_EPS = np.finfo(float).eps
_FD_STEP = _EPS ** (1.0 / 3.0)   # central first differences
_FD2_STEP = _EPS ** 0.25         # nested second differences


# --------------------------------------------------------------------------
# model families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PolynomialProduct:
    """f = prod_i q_i - C; with ``quarter`` set (default at n=2), C -> C/4."""

    C: float
    n: int = 2
    quarter: bool | None = None

    kind = "polynomial_product"
    requires_positive_momentum = False
    requires_distinct_momenta = False
    factorizes = False
    default_dispersion = QUADRATIC

    @property
    def effective_c(self) -> float:
        quarter = self.n == 2 if self.quarter is None else self.quarter
        return self.C / 4.0 if quarter else self.C


@dataclass(frozen=True)
class SinhPair:
    """f = sinh(q_1) sinh(q_2) - C, a two-particle model."""

    C: float

    kind = "sinh_pair"
    n = 2
    requires_positive_momentum = False
    requires_distinct_momenta = False
    factorizes = False
    default_dispersion = QUADRATIC


@dataclass(frozen=True)
class KdVDeterminant:
    """f = det(E0 + v) det(E0 - v), E0 = diag(eps_i exp(-2 p_i q_i)).

    The signs eps_i live on the phase point.  Free flow uses the cubic
    dispersion, q_i(t) = a_i + p_i^2 t.
    """

    n: int

    kind = "kdv_determinant"
    requires_positive_momentum = True
    requires_distinct_momenta = False
    factorizes = True
    default_dispersion = CUBIC


@dataclass(frozen=True)
class SinhGordonDeterminant:
    """Same determinant product as KdV, read in cone variables.

    x plays the role of the cone coordinate xi and time of eta; free flow
    uses the inverse dispersion, q_i(eta) = a_i - eta / p_i^2.
    """

    n: int

    kind = "sinh_gordon_determinant"
    requires_positive_momentum = True
    requires_distinct_momenta = False
    factorizes = True
    default_dispersion = INVERSE


@dataclass(frozen=True)
class CharacteristicCM:
    """f = det(Q + W - x I), W_jk = gamma / (p_j - p_k) off-diagonal."""

    gamma: float

    kind = "characteristic_cm"
    requires_positive_momentum = False
    requires_distinct_momenta = True
    factorizes = False
    default_dispersion = QUADRATIC


@dataclass(frozen=True)
class CharacteristicRS:
    """f = det(Q + W - x I), W_jk = gamma p_j / (p_j - p_k) off-diagonal."""

    gamma: float

    kind = "characteristic_rs"
    requires_positive_momentum = False
    requires_distinct_momenta = True
    factorizes = False
    default_dispersion = QUADRATIC


@dataclass(frozen=True)
class RelativisticPolynomialPair:
    """f = q_1 q_2 - (C/4)(1/p_1^2 + 1/p_2^2), evolved in the cone frame."""

    C: float

    kind = "relativistic_pair"
    n = 2
    requires_positive_momentum = False
    requires_distinct_momenta = False
    factorizes = False
    default_dispersion = INVERSE


MODEL_KINDS = {
    cls.kind: cls
    for cls in (
        PolynomialProduct,
        SinhPair,
        KdVDeterminant,
        SinhGordonDeterminant,
        CharacteristicCM,
        CharacteristicRS,
        RelativisticPolynomialPair,
    )
}

_DETERMINANT_KINDS = ("kdv_determinant", "sinh_gordon_determinant")
_CHARACTERISTIC_KINDS = ("characteristic_cm", "characteristic_rs")


# --------------------------------------------------------------------------
# coupling matrices
# --------------------------------------------------------------------------

def build_W(kind: str, p, gamma: float) -> np.ndarray:
    """Momentum-space coupling matrix of the characteristic models.

    ``kind`` is "cm" or "rs"; entry (j, k) is gamma/(p_j - p_k) or
    gamma p_j/(p_j - p_k), with a zero diagonal.
    """
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    n = len(p)
    diff = p[:, None] - p[None, :]
    off = ~np.eye(n, dtype=bool)
    if np.any(diff[off] == 0):
        raise DegenerateMomenta("coinciding momenta in coupling matrix")
    w = np.zeros((n, n), dtype=complex)
    if kind == "cm":
        w[off] = gamma / diff[off]
    elif kind == "rs":
        num = np.broadcast_to(gamma * p[:, None], (n, n))
        w[off] = num[off] / diff[off]
    else:
        raise ValueError(f"unknown coupling kind {kind!r}")
    return w


def _soliton_v(p: np.ndarray) -> np.ndarray:
    """v_ij = 2 p_i / (p_i + p_j); v_ii = 1 identically."""
    s = p[:, None] + p[None, :]
    if np.any(s == 0):
        raise DegenerateMomenta("p_i + p_j = 0 in soliton coupling matrix")
    return 2.0 * p[:, None] / s


# --------------------------------------------------------------------------
# raw evaluation on arrays (no validation; q, p arbitrary complex)
# --------------------------------------------------------------------------

def factor_values(model, q, p, epsilon, xs) -> list[np.ndarray]:
    """Row-rescaled values of det(E0 + v) and det(E0 - v) at q - x e."""
    if model.kind not in _DETERMINANT_KINDS:
        raise NotFactorizable(f"{model.kind} does not factorize")
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    eps = np.atleast_1d(np.asarray(epsilon, dtype=float))
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    v = _soliton_v(p)
    log_vmax = np.log(np.max(np.abs(v), axis=1))
    # exponents of E0 entries at the shifted point: eps_i exp(2 p_i (x - q_i))
    z = 2.0 * p[None, :] * (xs[:, None] - q[None, :])
    ls = np.maximum(z.real, log_vmax[None, :])
    diag = eps[None, :] * np.exp(z - ls)
    vs = np.exp(-ls)[:, :, None] * v[None, :, :]
    out = []
    for sign in (+1.0, -1.0):
        m = sign * vs.copy()
        m[:, np.arange(len(p)), np.arange(len(p))] += diag
        if not np.all(np.isfinite(m)):
            raise NumericalOverflow("determinant entries overflowed after rescaling")
        out.append(np.linalg.det(m))
    return out


def generating_values(model, q, p, epsilon, xs) -> np.ndarray:
    """Complex f(q - x e, p) for an array of real shifts x."""
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    kind = model.kind

    if kind == "polynomial_product":
        return np.prod(q[None, :] - xs[:, None], axis=1) - model.effective_c
    if kind == "sinh_pair":
        s = np.sinh(q[None, :] - xs[:, None])
        return s[:, 0] * s[:, 1] - model.C
    if kind == "relativistic_pair":
        if np.any(p == 0):
            raise ZeroMomentum("relativistic pair needs nonzero momenta")
        shift = (model.C / 4.0) * np.sum(1.0 / (p * p))
        return np.prod(q[None, :] - xs[:, None], axis=1) - shift
    if kind in _CHARACTERISTIC_KINDS:
        w = build_W("cm" if kind == "characteristic_cm" else "rs", p, model.gamma)
        n = len(q)
        a = np.broadcast_to(w, (len(xs), n, n)).copy()
        idx = np.arange(n)
        a[:, idx, idx] += q[None, :] - xs[:, None]
        return np.linalg.det(a)
    if kind in _DETERMINANT_KINDS:
        plus, minus = factor_values(model, q, p, epsilon, xs)
        return plus * minus
    raise ValueError(f"unknown model kind {kind!r}")


def generating_values_rows(model, qrows, p, epsilon, xs, factor=None) -> np.ndarray:
    """f evaluated with a different q vector per sample: qrows[i] at xs[i].

    Needed by lab-frame evaluation of the cone models, where the evolution
    parameter eta = x - t varies along the scan axis.  ``factor`` selects one
    determinant factor of a factorizable model.
    """
    qrows = np.asarray(qrows, dtype=complex)
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    kind = model.kind
    if kind in _DETERMINANT_KINDS:
        eps = np.atleast_1d(np.asarray(epsilon, dtype=float))
        v = _soliton_v(p)
        log_vmax = np.log(np.max(np.abs(v), axis=1))
        z = 2.0 * p[None, :] * (xs[:, None] - qrows)
        ls = np.maximum(z.real, log_vmax[None, :])
        diag = eps[None, :] * np.exp(z - ls)
        vs = np.exp(-ls)[:, :, None] * v[None, :, :]
        idx = np.arange(len(p))
        dets = []
        signs = (+1.0, -1.0) if factor is None else ((+1.0,) if factor == 0 else (-1.0,))
        for sign in signs:
            m = sign * vs.copy()
            m[:, idx, idx] += diag
            if not np.all(np.isfinite(m)):
                raise NumericalOverflow("determinant entries overflowed after rescaling")
            dets.append(np.linalg.det(m))
        return dets[0] if len(dets) == 1 else dets[0] * dets[1]
    if factor is not None:
        raise NotFactorizable(f"{model.kind} does not factorize")
    if kind == "polynomial_product":
        return np.prod(qrows - xs[:, None], axis=1) - model.effective_c
    if kind == "sinh_pair":
        s = np.sinh(qrows - xs[:, None])
        return s[:, 0] * s[:, 1] - model.C
    if kind == "relativistic_pair":
        if np.any(p == 0):
            raise ZeroMomentum("relativistic pair needs nonzero momenta")
        shift = (model.C / 4.0) * np.sum(1.0 / (p * p))
        return np.prod(qrows - xs[:, None], axis=1) - shift
    raise ValueError(f"row evaluation unsupported for {kind!r}")


def generating_grad_q(model, q, p, epsilon, x: float) -> np.ndarray:
    """Partial derivatives (df/dq_j)_j at the shifted point q - x e."""
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    n = len(q)
    kind = model.kind
    y = q - x

    if kind in ("polynomial_product", "relativistic_pair"):
        grad = np.empty(n, dtype=complex)
        for j in range(n):
            grad[j] = np.prod(np.delete(y, j))
        return grad
    if kind == "sinh_pair":
        return np.array(
            [np.cosh(y[0]) * np.sinh(y[1]), np.sinh(y[0]) * np.cosh(y[1])], dtype=complex
        )
    if kind in _CHARACTERISTIC_KINDS:
        a = _characteristic_matrix(model, q, p, x)
        grad = np.empty(n, dtype=complex)
        for j in range(n):
            grad[j] = _principal_minor_det(a, (j,))
        return grad
    if kind in _DETERMINANT_KINDS:
        grad = np.empty(n, dtype=complex)
        for j in range(n):
            h = _FD_STEP * max(1.0, abs(q[j]))
            e = np.zeros(n)
            e[j] = h
            fp = generating_values(model, q + e, p, epsilon, x)[0]
            fm = generating_values(model, q - e, p, epsilon, x)[0]
            grad[j] = (fp - fm) / (2.0 * h)
        return grad
    raise ValueError(f"unknown model kind {kind!r}")


def generating_hess_q(model, q, p, epsilon, x: float) -> np.ndarray:
    """Second partials (d2f/dq_j dq_k) at the shifted point q - x e."""
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    n = len(q)
    kind = model.kind
    y = q - x
    hess = np.zeros((n, n), dtype=complex)

    if kind in ("polynomial_product", "relativistic_pair"):
        for j in range(n):
            for k in range(j + 1, n):
                val = np.prod(np.delete(y, (j, k)))
                hess[j, k] = hess[k, j] = val
        return hess
    if kind == "sinh_pair":
        s0, s1 = np.sinh(y[0]), np.sinh(y[1])
        c0, c1 = np.cosh(y[0]), np.cosh(y[1])
        return np.array([[s0 * s1, c0 * c1], [c0 * c1, s0 * s1]], dtype=complex)
    if kind in _CHARACTERISTIC_KINDS:
        a = _characteristic_matrix(model, q, p, x)
        for j in range(n):
            for k in range(j + 1, n):
                val = _principal_minor_det(a, (j, k))
                hess[j, k] = hess[k, j] = val
        return hess
    if kind in _DETERMINANT_KINDS:
        for j in range(n):
            for k in range(j, n):
                hj = _FD2_STEP * max(1.0, abs(q[j]))
                hk = _FD2_STEP * max(1.0, abs(q[k]))
                ej = np.zeros(n)
                ej[j] = hj
                ek = np.zeros(n)
                ek[k] = hk
                fpp = generating_values(model, q + ej + ek, p, epsilon, x)[0]
                fpm = generating_values(model, q + ej - ek, p, epsilon, x)[0]
                fmp = generating_values(model, q - ej + ek, p, epsilon, x)[0]
                fmm = generating_values(model, q - ej - ek, p, epsilon, x)[0]
                hess[j, k] = hess[k, j] = (fpp - fpm - fmp + fmm) / (4.0 * hj * hk)
        return hess
    raise ValueError(f"unknown model kind {kind!r}")


def _characteristic_matrix(model, q, p, x) -> np.ndarray:
    w = build_W("cm" if model.kind == "characteristic_cm" else "rs", p, model.gamma)
    return w + np.diag(q - x)


def _principal_minor_det(a: np.ndarray, drop) -> complex:
    keep = np.setdiff1d(np.arange(a.shape[0]), drop)
    if len(keep) == 0:
        return 1.0 + 0.0j
    return complex(np.linalg.det(a[np.ix_(keep, keep)]))


# --------------------------------------------------------------------------
# validated scalar interface
# --------------------------------------------------------------------------

def _check_point(model, point: PhasePoint) -> None:
    expected = getattr(model, "n", None)
    if expected is not None and point.n != expected:
        raise InvalidPoint(f"{model.kind} expects {expected} particles, got {point.n}")
    try:
        validate(point, model)
    except ZerodynError as exc:
        raise InvalidPoint(str(exc)) from exc


def eval_f(model, point: PhasePoint, x: float) -> tuple[float, float]:
    """Evaluate f(q - x e, p); returns (real part, |imaginary residue|)."""
    _check_point(model, point)
    val = generating_values(model, point.q, point.p, point.epsilon, x)[0]
    if not np.isfinite(val):
        raise NumericalOverflow("generating function overflowed")
    return float(val.real), abs(float(val.imag))


def eval_factors(model, point: PhasePoint, x: float) -> list[float]:
    """Per-factor values det(E0 + v), det(E0 - v) for determinant models."""
    if not model.factorizes:
        raise NotFactorizable(f"{model.kind} does not factorize")
    _check_point(model, point)
    vals = factor_values(model, point.q, point.p, point.epsilon, x)
    return [float(v[0].real) for v in vals]


def eval_f_dx(model, point: PhasePoint, x: float) -> float:
    """d/dx of f(q - x e, p), analytic where available, else central FD."""
    _check_point(model, point)
    return float(
        _dfdx_values(model, point.q, point.p, point.epsilon, np.array([x]))[0].real
    )


def _dfdx_values(model, q, p, epsilon, xs) -> np.ndarray:
    """Vector d/dx of f(q - x e, p); complex before reality projection."""
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    kind = model.kind
    if kind in ("polynomial_product", "relativistic_pair"):
        y = q[None, :] - xs[:, None]
        total = np.zeros(len(xs), dtype=complex)
        for j in range(len(q)):
            total += np.prod(np.delete(y, j, axis=1), axis=1)
        return -total
    if kind == "sinh_pair":
        y = q[None, :] - xs[:, None]
        return -np.sinh(y[:, 0] + y[:, 1])
    if kind in _CHARACTERISTIC_KINDS:
        out = np.empty(len(xs), dtype=complex)
        for i, x in enumerate(xs):
            out[i] = -np.sum(generating_grad_q(model, q, p, epsilon, float(x)))
        return out
    if kind in _DETERMINANT_KINDS:
        h = _FD_STEP * np.maximum(1.0, np.abs(xs))
        fp = generating_values(model, q, p, epsilon, xs + h)
        fm = generating_values(model, q, p, epsilon, xs - h)
        return (fp - fm) / (2.0 * h)
    raise ValueError(f"unknown model kind {kind!r}")


def root_function(model, point: PhasePoint, factor: int | None = None):
    """Real callable g(xs) whose zeros are particle positions.

    ``factor`` selects one determinant factor (0 for +v, 1 for -v) of a
    factorizable model.  The returned callable also carries ``.derivative``
    for scalar Newton steps.
    """
    q, p, eps = point.q, point.p, point.epsilon

    if factor is None:
        def g(xs):
            return np.asarray(generating_values(model, q, p, eps, xs).real, dtype=float)

        def dg(x):
            return float(_dfdx_values(model, q, p, eps, np.array([float(x)]))[0].real)
    else:
        sign = 0 if factor == 0 else 1

        def g(xs):
            return np.asarray(factor_values(model, q, p, eps, xs)[sign].real, dtype=float)

        def dg(x):
            x = float(x)
            h = _FD_STEP * max(1.0, abs(x))
            return float((g(np.array([x + h]))[0] - g(np.array([x - h]))[0]) / (2 * h))

    g.derivative = dg
    return g


def default_dispersion(model):
    """The free flow the model family is defined with."""
    return model.default_dispersion
