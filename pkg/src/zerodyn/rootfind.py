"""Locating all simple real zeros of a scalar function on a window.

A uniform scan brackets sign changes, then a safeguarded Newton iteration
(bisection fallback, bracket always maintained) polishes each root.  The
high-level entry point wires a model and phase point into that pipeline,
running the two determinant factors separately when the model factorizes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import models as _models
from .errors import NoConvergence, NonFiniteValue, WindowTooSmall
from .phase_space import PhasePoint

#: |g'(root)| below this fraction of the scanned slope scale flags the root
#: as a near-double (imminent creation/annihilation).
NEAR_DOUBLE_FRACTION = 1e-7


@dataclass(frozen=True)
class RootFindOptions:
    """Scan window and refinement tolerances.

    ``window=None`` asks for an automatic window derived from the phase
    point, which is also allowed to grow when a root crowds its edge.
    """

    window: tuple[float, float] | None = None
    n_scan: int = 2048
    x_tol_abs: float = 1e-12
    x_tol_rel: float = 1e-12
    max_newton: int = 50

    def __post_init__(self):
        if self.window is not None and not self.window[0] < self.window[1]:
            raise ValueError("window must satisfy lo < hi")
        if self.n_scan < 16:
            raise ValueError("n_scan must be at least 16")


@dataclass(frozen=True)
class RootRecord:
    x: float
    factor_id: int | None
    near_double: bool


@dataclass(frozen=True)
class RootSet:
    """Sorted real zeros with factor tags and near-double flags."""

    entries: tuple[RootRecord, ...]
    window: tuple[float, float]

    @property
    def roots(self) -> np.ndarray:
        return np.array([e.x for e in self.entries])

    @property
    def count(self) -> int:
        return len(self.entries)

    def factor_roots(self, factor_id) -> np.ndarray:
        return np.array([e.x for e in self.entries if e.factor_id == factor_id])


def _call(g, xs: np.ndarray) -> np.ndarray:
    import warnings

    with warnings.catch_warnings():
        # scalar-only callables (math.sinh, ...) must fall through cleanly
        warnings.simplefilter("error", DeprecationWarning)
        try:
            vals = np.asarray(g(xs), dtype=float)
            if vals.shape == xs.shape:
                return vals
        except (TypeError, ValueError, DeprecationWarning):
            pass
    return np.array([float(g(float(x))) for x in xs])


def _call_scalar(g, x: float) -> float:
    return float(_call(g, np.array([x]))[0])


def scan_brackets(g, window, n_scan=2048):
    """Sign-change brackets of g on a uniform grid; exact grid zeros too.

    Returns (brackets, grid_zeros, slope_scale) where slope_scale is the
    largest |dg/dx| seen on the grid, used to flag near-double roots.
    """
    xs = np.linspace(window[0], window[1], n_scan)
    vals = _call(g, xs)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("scanned function produced NaN/inf")
    signs = np.sign(vals)
    flips = signs[:-1] * signs[1:] < 0
    brackets = [(float(xs[i]), float(xs[i + 1])) for i in np.nonzero(flips)[0]]
    grid_zeros = [float(x) for x, s in zip(xs, signs) if s == 0]
    dx = xs[1] - xs[0]
    slope_scale = float(np.max(np.abs(np.diff(vals))) / dx) if n_scan > 1 else 1.0
    return brackets, grid_zeros, max(slope_scale, np.finfo(float).tiny)


def refine(g, gprime, bracket, opts: RootFindOptions) -> float:
    """Safeguarded Newton on a sign-change bracket.

    Newton steps that leave the bracket, or meet a tiny derivative, fall
    back to bisection; the bracket shrinks monotonically either way.
    """
    a, b = bracket
    fa, fb = _call_scalar(g, a), _call_scalar(g, b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise NoConvergence(f"no sign change on bracket {bracket}")
    x = 0.5 * (a + b)
    for _ in range(opts.max_newton):
        fx = _call_scalar(g, x)
        if fx == 0.0:
            return x
        if fx * fa < 0:
            b, fb = x, fx
        else:
            a, fa = x, fx
        tol = opts.x_tol_abs + opts.x_tol_rel * abs(x)
        if b - a <= tol:
            return 0.5 * (a + b)
        d = gprime(x) if gprime is not None else None
        step_ok = False
        if d is not None and d != 0 and np.isfinite(d):
            x_new = x - fx / d
            if a < x_new < b:
                x, step_ok = x_new, True
        if not step_ok:
            x = 0.5 * (a + b)
    raise NoConvergence(f"root refinement stalled on {bracket}")


def _windowed_roots(g, window, opts):
    brackets, grid_zeros, slope_scale = scan_brackets(g, window, opts.n_scan)
    roots = [refine(g, getattr(g, "derivative", None), br, opts) for br in brackets]
    roots = sorted(roots + grid_zeros)
    return roots, slope_scale


def find_real_roots(model, point: PhasePoint, opts: RootFindOptions | None = None) -> RootSet:
    """All simple real zeros of f(q - x e, p), factor-tagged when available.

    With an automatic window the search widens until no root crowds an
    edge; with an explicit window that condition raises WindowTooSmall.
    """
    opts = opts or RootFindOptions()
    _models._check_point(model, point)
    auto = opts.window is None
    window = default_window(model, point) if auto else opts.window

    for _ in range(12):
        try:
            return _find_in_window(model, point, window, opts)
        except WindowTooSmall:
            if not auto:
                raise
            mid = 0.5 * (window[0] + window[1])
            half = 0.8 * (window[1] - window[0])
            window = (mid - half, mid + half)
    raise WindowTooSmall(f"window kept growing past {window}")


def _find_in_window(model, point, window, opts) -> RootSet:
    factor_ids = (0, 1) if model.factorizes else (None,)
    entries = []
    cell = (window[1] - window[0]) / (opts.n_scan - 1)
    for fid in factor_ids:
        g = _models.root_function(model, point, fid)
        roots, slope_scale = _windowed_roots(g, window, opts)
        for r in roots:
            if r < window[0] + cell or r > window[1] - cell:
                raise WindowTooSmall(f"root {r} within one cell of window {window}")
            slope = abs(g.derivative(r))
            entries.append(RootRecord(r, fid, slope < NEAR_DOUBLE_FRACTION * slope_scale))
    entries.sort(key=lambda e: e.x)
    return RootSet(tuple(entries), window)


def default_window(model, point: PhasePoint) -> tuple[float, float]:
    """Window guaranteed (generously) to contain every real zero.

    All families keep their zeros near the real parts of q; the margin adds
    the model's own displacement scale (constant term, coupling radius, or
    soliton phase-shift scale).
    """
    re_q = point.q.real
    lo, hi = float(np.min(re_q)), float(np.max(re_q))
    spread = hi - lo
    kind = model.kind

    if kind == "polynomial_product":
        extra = abs(model.effective_c) ** (1.0 / point.n)
    elif kind == "sinh_pair":
        extra = float(np.arcsinh(np.sqrt(abs(model.C)))) + np.max(np.abs(point.q.imag))
    elif kind == "relativistic_pair":
        shift = (model.C / 4.0) * np.sum(1.0 / (point.p * point.p))
        extra = abs(shift) ** 0.5 + np.max(np.abs(point.q.imag))
    elif kind in ("characteristic_cm", "characteristic_rs"):
        w = _models.build_W(
            "cm" if kind == "characteristic_cm" else "rs", point.p, model.gamma
        )
        gershgorin = float(np.max(np.sum(np.abs(w), axis=1)))
        extra = gershgorin + float(np.max(np.abs(point.q.imag)))
    else:  # soliton determinants
        v = _models._soliton_v(point.p)
        vmax = np.max(np.abs(v))
        rep = point.p.real
        extra = float(
            np.max((np.log(2 * point.n * vmax) + np.abs(point.p.imag * point.q.imag)) / (2 * rep))
        ) + float(np.max(np.abs(point.q.imag)))

    delta = 2.0 * (spread + extra + 1.0)
    return lo - delta, hi + delta
