"""Dynamics induced by the real zeros of evolving generating functions.

The library tracks the motion of the real x-zeros of f(q - x e, p) = 0 while
(q, p) follow a free Hamiltonian flow: particle world lines, their
creation/annihilation events, bound pairs, and the closed-form and
projection-method oracles that cross-check them.
"""

from .phase_space import (
    CUBIC,
    DISPERSIONS,
    INVERSE,
    QUADRATIC,
    Dispersion,
    PhasePoint,
    evolve,
    hamiltonian,
    lorentz_boost,
    validate,
)
from .models import (
    CharacteristicCM,
    CharacteristicRS,
    KdVDeterminant,
    MODEL_KINDS,
    PolynomialProduct,
    RelativisticPolynomialPair,
    SinhGordonDeterminant,
    SinhPair,
    build_W,
    default_dispersion,
    eval_f,
    eval_f_dx,
    eval_factors,
)
from .rootfind import RootFindOptions, RootSet, find_real_roots

__all__ = [
    "CUBIC",
    "DISPERSIONS",
    "INVERSE",
    "QUADRATIC",
    "Dispersion",
    "PhasePoint",
    "evolve",
    "hamiltonian",
    "lorentz_boost",
    "validate",
    "CharacteristicCM",
    "CharacteristicRS",
    "KdVDeterminant",
    "MODEL_KINDS",
    "PolynomialProduct",
    "RelativisticPolynomialPair",
    "SinhGordonDeterminant",
    "SinhPair",
    "build_W",
    "default_dispersion",
    "eval_f",
    "eval_f_dx",
    "eval_factors",
    "RootFindOptions",
    "RootSet",
    "find_real_roots",
]

__version__ = "0.1.0"
