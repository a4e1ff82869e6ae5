"""Shipped configurations: one per figure-level phenomenon, plus sweeps.

Every preset pins a model, a valid phase point, the matching free flow and a
time grid on which the advertised structure (line counts, events,
periodicity) is machine-checkable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cauchy import CauchyData, cauchy_polynomial_pair, cauchy_sinh_pair
from .models import (
    CharacteristicCM,
    CharacteristicRS,
    KdVDeterminant,
    PolynomialProduct,
    RelativisticPolynomialPair,
    SinhGordonDeterminant,
    SinhPair,
)
from .phase_space import CUBIC, INVERSE, QUADRATIC, Dispersion, PhasePoint


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    model: object
    point: PhasePoint
    dispersion: Dispersion
    t_grid: tuple[float, float, float]
    frame: str = "native"
    expect: dict = field(default_factory=dict)


def figure_presets() -> dict[str, Preset]:
    """The stock of phenomena, keyed by a short slug."""
    out = {}
    breather_p = (np.sqrt(3) + 1j) / 2  # unit modulus, zero mean drift

    out["free_soliton"] = Preset(
        "free_soliton",
        "single soliton, free motion x(t) = a + p^2 t",
        KdVDeterminant(n=1),
        PhasePoint.real([0.0], [1.0]),
        CUBIC,
        (-3.0, 3.0, 0.25),
        expect={"lines": 1, "creations": 0, "annihilations": 0, "crossings": 0},
    )
    out["soliton_soliton"] = Preset(
        "soliton_soliton",
        "two solitons repulse with phase shifts; both zeros on one factor",
        KdVDeterminant(n=2),
        PhasePoint.real([0.0, 0.0], [0.8, 1.3]),
        CUBIC,
        (-12.0, 12.0, 0.25),
        expect={"lines": 2, "creations": 0, "annihilations": 0, "crossings": 0,
                "same_factor": True, "phase_shift": True},
    )
    out["soliton_antisoliton"] = Preset(
        "soliton_antisoliton",
        "soliton and antisoliton attract and pass through each other",
        KdVDeterminant(n=2),
        PhasePoint.real([0.0, 0.0], [0.8, 1.3], epsilon=[1, -1]),
        CUBIC,
        (-12.0, 12.0, 0.25),
        expect={"lines": 2, "creations": 0, "annihilations": 0, "crossings": 1},
    )
    out["breather"] = Preset(
        "breather",
        "conjugate momentum pair: bound zeros circulating with period pi",
        KdVDeterminant(n=2),
        PhasePoint.paired([0.0, 0.0], [breather_p, breather_p.conjugate()], pairs=[(0, 1)]),
        CUBIC,
        (-4.0, 4.0, 0.05),
        expect={"lines": 2, "creations": 0, "annihilations": 0,
                "min_crossings": 4, "period": np.pi},
    )
    out["soliton_breather"] = Preset(
        "soliton_breather",
        "soliton knocks its like-natured partner out of a breather",
        KdVDeterminant(n=3),
        PhasePoint.paired(
            [0.0, 0.0, -14.0],
            [breather_p, breather_p.conjugate(), 1.1],
            pairs=[(0, 1)],
            epsilon=[1, 1, 1],
        ),
        CUBIC,
        (2.0, 22.0, 0.1),
        expect={"lines": 3, "creations": 0, "annihilations": 0, "exchange": True},
    )

    out["pair_repulsion"] = Preset(
        "pair_repulsion",
        "two particles, separation squared stays above the constant",
        PolynomialProduct(C=9.0, n=2),
        cauchy_polynomial_pair(9.0, CauchyData([-2.0, 2.0], [1.0, -1.0])),
        QUADRATIC,
        (-6.0, 6.0, 0.05),
        expect={"lines": 2, "creations": 0, "annihilations": 0, "min_sep_sq": 9.0},
    )
    out["pair_finite_life"] = Preset(
        "pair_finite_life",
        "pair created and annihilated at the zeros of the closed form",
        PolynomialProduct(C=2.0, n=2),
        cauchy_polynomial_pair(2.0, CauchyData([-0.5, 0.5], [-1.0, 1.0])),
        QUADRATIC,
        (-1.5, 2.5, 0.02),
        expect={"creations": 1, "annihilations": 1, "order": "creation_first"},
    )
    out["pair_cheshirization"] = Preset(
        "pair_cheshirization",
        "incoming pair annihilates; a pair reappears later from nowhere",
        PolynomialProduct(C=-4.0, n=2),
        cauchy_polynomial_pair(-4.0, CauchyData([-1.0, 1.0], [2.0, -2.0])),
        QUADRATIC,
        (-1.5, 3.5, 0.02),
        expect={"creations": 1, "annihilations": 1, "order": "annihilation_first"},
    )
    out["three_descend"] = Preset(
        "three_descend",
        "three particles briefly reduce to one that still feels the others",
        PolynomialProduct(C=1.0, n=3, quarter=False),
        PhasePoint.real([-2.0, 0.0, 2.0], [1.0, 0.0, -1.0]),
        QUADRATIC,
        (-2.0, 7.0, 0.05),
        expect={"creations": 1, "annihilations": 1, "count_min": 1, "count_max": 3,
                "order": "annihilation_first"},
    )
    out["three_finite"] = Preset(
        "three_finite",
        "three particles exist only in a finite window; one line persists",
        PolynomialProduct(C=1.0, n=3, quarter=False),
        PhasePoint.paired(
            [5.0, 0.8j, -0.8j], [-1.0, 0.4j, -0.4j], pairs=[(1, 2)]
        ),
        QUADRATIC,
        (-8.0, 4.0, 0.05),
        expect={"creations": 1, "annihilations": 1, "count_min": 1, "count_max": 3,
                "order": "creation_first"},
    )
    out["ten_particles"] = Preset(
        "ten_particles",
        "counter-beams of five; cascades of virtual pairs",
        PolynomialProduct(C=1.0, n=10, quarter=False),
        PhasePoint.real(
            [-10.0, -7.9, -6.1, -3.8, -2.0, 2.1, 4.3, 6.0, 8.2, 9.9],
            [1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -1.0],
        ),
        QUADRATIC,
        (0.0, 12.0, 0.05),
        expect={"min_events": 8, "count_max": 10},
    )

    out["sinh_oscillation"] = Preset(
        "sinh_oscillation",
        "two particles oscillate about fixed centres, no events",
        SinhPair(C=5.0),
        cauchy_sinh_pair(5.0, CauchyData([-1.5, 1.5], [0.3, -0.3])),
        QUADRATIC,
        (-2.6, 2.6, 0.02),
        expect={"lines": 2, "creations": 0, "annihilations": 0, "periodic": True},
    )
    out["sinh_cascade"] = Preset(
        "sinh_cascade",
        "periodic creations/annihilations: a cascade of virtual pairs",
        SinhPair(C=0.5),
        cauchy_sinh_pair(0.5, CauchyData([-0.5, 0.5], [0.5, -0.5])),
        QUADRATIC,
        (-6.0, 6.0, 0.05),
        expect={"min_creations": 2, "min_annihilations": 2, "recurring": True},
    )

    out["cm_pair"] = Preset(
        "cm_pair",
        "two attracting characteristic-model particles with a gap",
        CharacteristicCM(gamma=1.0),
        PhasePoint.real([0.0, 0.0], [1.0, -1.0]),
        QUADRATIC,
        (-2.0, 2.0, 0.02),
        expect={"creations": 1, "annihilations": 1, "order": "annihilation_first"},
    )
    out["rs_pair"] = Preset(
        "rs_pair",
        "velocity-coupled pair with an annihilation/creation gap",
        CharacteristicRS(gamma=0.5),
        PhasePoint.real([-2.0, 2.0], [0.9, 0.4]),
        QUADRATIC,
        (3.0, 13.0, 0.05),
        expect={"creations": 1, "annihilations": 1, "order": "annihilation_first"},
    )

    theta = 0.6
    out["sg_soliton_soliton"] = Preset(
        "sg_soliton_soliton",
        "relativistic repulsion; speeds below light speed",
        SinhGordonDeterminant(n=2),
        PhasePoint.real([0.0, 0.0], [np.exp(-theta), np.exp(theta)], epsilon=[-1, -1]),
        INVERSE,
        (-6.0, 6.0, 0.05),
        frame="lab",
        expect={"lines": 2, "creations": 0, "annihilations": 0, "crossings": 0,
                "max_speed": 1.0},
    )
    out["sg_soliton_antisoliton"] = Preset(
        "sg_soliton_antisoliton",
        "relativistic attraction; light-like only at the crossing",
        SinhGordonDeterminant(n=2),
        PhasePoint.real([0.0, 0.0], [np.exp(-theta), np.exp(theta)], epsilon=[1, -1]),
        INVERSE,
        (-6.0, 6.0, 0.05),
        frame="lab",
        expect={"lines": 2, "creations": 0, "annihilations": 0, "crossings": 1,
                "max_speed": 1.0},
    )
    phi = 0.5
    out["sg_breather"] = Preset(
        "sg_breather",
        "relativistic bound pair; periodic crossings",
        SinhGordonDeterminant(n=2),
        PhasePoint.paired(
            [0.0, 0.0], [np.exp(1j * phi), np.exp(-1j * phi)], pairs=[(0, 1)]
        ),
        INVERSE,
        (-4.0, 4.0, 0.02),
        frame="lab",
        expect={"lines": 2, "creations": 0, "annihilations": 0, "min_crossings": 2,
                "max_speed": 1.0},
    )

    out["relativistic_repulsion"] = Preset(
        "relativistic_repulsion",
        "relativistic pair, positive separation invariant: repulsion",
        RelativisticPolynomialPair(C=2.0),
        PhasePoint.real([-2.0, 2.0], [0.8, 1.5]),
        INVERSE,
        (-5.0, 5.0, 0.05),
        expect={"lines": 2, "creations": 0, "annihilations": 0},
    )
    p_rel = 1.2 * np.exp(0.4j)
    out["relativistic_finite_life"] = Preset(
        "relativistic_finite_life",
        "relativistic pair exists in a finite cone-time window",
        RelativisticPolynomialPair(C=2.0),
        PhasePoint.paired([0.4j, -0.4j], [p_rel, p_rel.conjugate()], pairs=[(0, 1)]),
        INVERSE,
        (-4.0, 4.0, 0.02),
        expect={"creations": 1, "annihilations": 1, "order": "creation_first"},
    )
    return out


def polynomial_regime_sweep():
    """(model, data, expected regime) over all three polynomial regimes."""
    from .oracles import CHESHIRIZATION, FINITE_LIFE, REPULSION

    rows = []
    for C, sep, regime in [
        (2.0, 1.0, FINITE_LIFE),
        (9.0, 1.0, FINITE_LIFE),
        (9.0, 2.0, FINITE_LIFE),
        (2.0, 2.0, REPULSION),
        (2.0, 4.0, REPULSION),
        (9.0, 4.0, REPULSION),
        (-2.0, 1.0, CHESHIRIZATION),
        (-2.0, 2.0, CHESHIRIZATION),
        (-4.0, 3.0, CHESHIRIZATION),
    ]:
        data = CauchyData([-sep / 2, sep / 2], [1.0, -1.0])
        rows.append((PolynomialProduct(C=C, n=2), data, regime))
    return rows


def sinh_regime_sweep():
    """(model, data, expected regime) covering all four sinh regimes."""
    from .oracles import CHESHIRIZATION, OSCILLATION, REPULSION, VIRTUAL_CASCADE

    rows = []
    for C, sep, regime in [
        (0.5, 1.5, REPULSION),
        (2.0, 2.4, REPULSION),
        (3.0, 2.7, REPULSION),
        (2.0, 2.0, OSCILLATION),
        (5.0, 3.0, OSCILLATION),
        (1.5, 1.8, OSCILLATION),
        (0.5, 1.0, VIRTUAL_CASCADE),
        (0.8, 1.5, VIRTUAL_CASCADE),
        (0.3, 0.9, VIRTUAL_CASCADE),
        (-0.5, 1.0, CHESHIRIZATION),
        (-1.0, 1.5, CHESHIRIZATION),
        (-2.0, 2.0, CHESHIRIZATION),
    ]:
        data = CauchyData([-sep / 2, sep / 2], [0.5, -0.5])
        rows.append((SinhPair(C=C), data, regime))
    return rows
