"""Phase points, reality pairing, free evolution and boosts.

The moduli space of a model is the set of 2N complex canonical variables
(q, p) together with an involution sigma pairing complex-conjugate entries.
All real zeros machinery downstream assumes that the generating function is
real on the real axis, which holds exactly when q[sigma] = conj(q),
p[sigma] = conj(p) and sign parameters agree across pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BrokenPairing,
    DegenerateMomenta,
    NonPositiveLambda,
    NonPositiveMomentum,
    NonRealFixedPoint,
    ZeroMomentum,
)

#: Relative tolerance for "is real" / "is conjugate" checks.
REALITY_RTOL = 1e-12


def _as_readonly(a, dtype):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PhasePoint:
    """Immutable point (q, p) with conjugation pairing and per-index signs.

    ``pairing`` is an involution on indices: ``pairing[i] == i`` marks a real
    entry, ``pairing[i] == j`` (with ``pairing[j] == i``) a conjugate pair.
    ``epsilon`` carries the +-1 signs used by the determinant models and is
    all +1 otherwise.
    """

    q: np.ndarray
    p: np.ndarray
    epsilon: np.ndarray
    pairing: np.ndarray

    def __post_init__(self):
        n = len(np.atleast_1d(self.q))
        object.__setattr__(self, "q", _as_readonly(np.atleast_1d(self.q), complex))
        object.__setattr__(self, "p", _as_readonly(np.atleast_1d(self.p), complex))
        eps = self.epsilon if self.epsilon is not None else np.ones(n)
        object.__setattr__(self, "epsilon", _as_readonly(np.atleast_1d(eps), int))
        pairing = self.pairing if self.pairing is not None else np.arange(n)
        object.__setattr__(self, "pairing", _as_readonly(np.atleast_1d(pairing), int))
        if n < 1:
            raise BrokenPairing("need at least one particle")
        if not (len(self.p) == len(self.epsilon) == len(self.pairing) == n):
            raise BrokenPairing("q, p, epsilon, pairing must share one length")

    @property
    def n(self) -> int:
        return len(self.q)

    @classmethod
    def real(cls, q, p, epsilon=None):
        """Point with all entries real and the identity pairing."""
        q = np.atleast_1d(np.asarray(q, dtype=float))
        return cls(q, np.asarray(p, dtype=float), epsilon, np.arange(len(q)))

    @classmethod
    def paired(cls, q, p, pairs=(), epsilon=None):
        """Point with explicit conjugate ``pairs`` of indices, rest real."""
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        pairing = np.arange(len(q))
        for i, j in pairs:
            pairing[i], pairing[j] = j, i
        return cls(q, p, epsilon, pairing)

    def conjugate_closed(self, rtol=REALITY_RTOL):
        """Return self with tiny imaginary parts on fixed indices zeroed."""
        q = np.array(self.q)
        p = np.array(self.p)
        fixed = self.pairing == np.arange(self.n)
        q[fixed] = q[fixed].real
        p[fixed] = p[fixed].real
        return PhasePoint(q, p, np.array(self.epsilon), np.array(self.pairing))


@dataclass(frozen=True)
class Dispersion:
    """One-particle Hamiltonian h(p) generating the free flow q' = h'(p)."""

    name: str

    def h(self, p):
        p = np.asarray(p)
        if self.name == "quadratic":
            return p * p / 2.0
        if self.name == "cubic":
            return p * p * p / 3.0
        if self.name == "inverse":
            self._check_nonzero(p)
            return 1.0 / p
        raise ValueError(f"unknown dispersion {self.name!r}")

    def velocity(self, p):
        """Exact derivative h'(p)."""
        p = np.asarray(p)
        if self.name == "quadratic":
            return p
        if self.name == "cubic":
            return p * p
        if self.name == "inverse":
            self._check_nonzero(p)
            return -1.0 / (p * p)
        raise ValueError(f"unknown dispersion {self.name!r}")

    def _check_nonzero(self, p):
        if np.any(p == 0):
            raise ZeroMomentum("inverse dispersion undefined at p = 0")


QUADRATIC = Dispersion("quadratic")
CUBIC = Dispersion("cubic")
INVERSE = Dispersion("inverse")

DISPERSIONS = {d.name: d for d in (QUADRATIC, CUBIC, INVERSE)}


def validate(point: PhasePoint, model=None, rtol=REALITY_RTOL) -> None:
    """Check pairing, conjugation and model-specific momentum constraints.

    Raises BrokenPairing / NonRealFixedPoint / NonPositiveMomentum /
    DegenerateMomenta; returns None when the point is admissible.
    """
    n = point.n
    sigma = point.pairing
    if np.any(sigma < 0) or np.any(sigma >= n) or np.any(sigma[sigma] != np.arange(n)):
        raise BrokenPairing("pairing is not an involution on indices")
    if np.any(point.epsilon[sigma] != point.epsilon):
        raise BrokenPairing("signs differ across a conjugate pair")

    scale_q = np.maximum(1.0, np.abs(point.q))
    scale_p = np.maximum(1.0, np.abs(point.p))
    fixed = sigma == np.arange(n)
    if np.any(np.abs(point.q[fixed].imag) > rtol * scale_q[fixed]) or np.any(
        np.abs(point.p[fixed].imag) > rtol * scale_p[fixed]
    ):
        raise NonRealFixedPoint("unpaired entries must be real")
    paired = ~fixed
    if np.any(np.abs(point.q[sigma][paired] - point.q[paired].conj()) > rtol * scale_q[paired]) or np.any(
        np.abs(point.p[sigma][paired] - point.p[paired].conj()) > rtol * scale_p[paired]
    ):
        raise BrokenPairing("paired entries are not complex conjugate")

    if model is not None:
        if getattr(model, "requires_positive_momentum", False) and np.any(point.p.real <= 0):
            raise NonPositiveMomentum("determinant models need Re p > 0")
        if getattr(model, "requires_distinct_momenta", False):
            ps = point.p
            diff = ps[:, None] - ps[None, :]
            diff[np.diag_indices(n)] = 1.0
            if np.min(np.abs(diff)) == 0.0:
                raise DegenerateMomenta("coinciding momenta are rejected")


def evolve(point: PhasePoint, d: Dispersion, dt: float) -> PhasePoint:
    """Free flow: q += dt * h'(p), p unchanged. Exact for any dt."""
    q = point.q + dt * d.velocity(point.p)
    return PhasePoint(q, np.array(point.p), np.array(point.epsilon), np.array(point.pairing))


def hamiltonian(point: PhasePoint, d: Dispersion) -> float:
    """Total energy sum_i h(p_i); real up to pairing tolerance."""
    total = np.sum(d.h(point.p))
    return float(total.real)


def lorentz_boost(point: PhasePoint, lam: float) -> PhasePoint:
    """Boost in cone variables: q -> lam q, p -> p / lam."""
    if not lam > 0:
        raise NonPositiveLambda("boost parameter must be positive")
    return PhasePoint(
        point.q * lam, point.p / lam, np.array(point.epsilon), np.array(point.pairing)
    )
