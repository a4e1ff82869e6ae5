import numpy as np
import pytest

from zerodyn.errors import (
    BrokenPairing,
    NonPositiveLambda,
    NonPositiveMomentum,
    NonRealFixedPoint,
    ZeroMomentum,
)
from zerodyn.models import KdVDeterminant
from zerodyn.phase_space import (
    CUBIC,
    INVERSE,
    QUADRATIC,
    PhasePoint,
    evolve,
    hamiltonian,
    lorentz_boost,
    validate,
)


class TestValidate:
    def test_all_real_ok(self):
        validate(PhasePoint.real([1.0, 2.0], [0.5, 1.5]))

    def test_conjugate_pair_ok(self):
        pt = PhasePoint.paired([1 + 1j, 1 - 1j], [2 + 1j, 2 - 1j], pairs=[(0, 1)])
        validate(pt)

    def test_complex_entry_at_fixed_index_rejected(self):
        pt = PhasePoint(np.array([1 + 1j, 3.0]), np.array([2.0, 1.0]), None, None)
        with pytest.raises((BrokenPairing, NonRealFixedPoint)):
            validate(pt)

    def test_non_involution_rejected(self):
        pt = PhasePoint(np.array([1.0, 2.0, 3.0]), np.ones(3), None, np.array([1, 2, 0]))
        with pytest.raises(BrokenPairing):
            validate(pt)

    def test_mismatched_pair_signs_rejected(self):
        pt = PhasePoint(
            np.array([1 + 1j, 1 - 1j]), np.array([2 + 1j, 2 - 1j]),
            np.array([1, -1]), np.array([1, 0]),
        )
        with pytest.raises(BrokenPairing):
            validate(pt)

    def test_determinant_model_needs_positive_momentum(self):
        pt = PhasePoint.real([0.0], [-1.0])
        with pytest.raises(NonPositiveMomentum):
            validate(pt, KdVDeterminant(n=1))


class TestEvolve:
    def test_quadratic_free_motion(self):
        pt = evolve(PhasePoint.real([0.0], [2.0]), QUADRATIC, 3.0)
        assert pt.q[0] == 6.0

    def test_cubic_velocity_is_p_squared(self):
        pt = evolve(PhasePoint.real([1.0], [2.0]), CUBIC, 1.0)
        assert pt.q[0] == 5.0

    def test_inverse_velocity(self):
        pt = evolve(PhasePoint.real([0.0], [2.0]), INVERSE, 4.0)
        assert pt.q[0] == -1.0

    def test_inverse_rejects_zero_momentum(self):
        with pytest.raises(ZeroMomentum):
            evolve(PhasePoint.real([0.0], [0.0]), INVERSE, 1.0)

    def test_flow_additivity(self):
        pt = PhasePoint.paired([1 + 2j, 1 - 2j], [0.5 + 1j, 0.5 - 1j], pairs=[(0, 1)])
        for d in (QUADRATIC, CUBIC, INVERSE):
            ab = evolve(evolve(pt, d, 0.7), d, -1.9)
            once = evolve(pt, d, -1.2)
            assert np.allclose(ab.q, once.q, atol=0, rtol=1e-15)

    def test_evolution_preserves_validity(self):
        pt = PhasePoint.paired([1 + 2j, 1 - 2j, 0.3], [0.5 + 1j, 0.5 - 1j, 2.0], pairs=[(0, 1)])
        validate(evolve(pt, CUBIC, 13.7))


class TestHamiltonian:
    def test_cubic_sum(self):
        assert hamiltonian(PhasePoint.real([0, 0], [1.0, 2.0]), CUBIC) == pytest.approx(3.0)

    def test_conjugate_pair_cancels(self):
        pt = PhasePoint.paired([0, 0], [1 + 1j, 1 - 1j], pairs=[(0, 1)])
        assert hamiltonian(pt, QUADRATIC) == pytest.approx(0.0, abs=1e-14)

    def test_inverse_sum(self):
        assert hamiltonian(PhasePoint.real([0, 0], [2.0, 4.0]), INVERSE) == pytest.approx(0.75)

    def test_constant_along_flow(self):
        pt = PhasePoint.paired([1 + 2j, 1 - 2j, -0.4], [0.5 + 1j, 0.5 - 1j, 1.3], pairs=[(0, 1)])
        for d in (QUADRATIC, CUBIC, INVERSE):
            h0 = hamiltonian(pt, d)
            h1 = hamiltonian(evolve(pt, d, 57.3), d)
            assert h1 == pytest.approx(h0, abs=1e-12)


class TestDispersionDerivative:
    def test_velocity_matches_finite_difference(self):
        rng = np.random.default_rng(0)
        for d in (QUADRATIC, CUBIC, INVERSE):
            for _ in range(20):
                p = rng.uniform(0.2, 3.0) * rng.choice([-1.0, 1.0])
                h = 1e-6 * max(1.0, abs(p))
                fd = (d.h(p + h) - d.h(p - h)) / (2 * h)
                assert d.velocity(p) == pytest.approx(fd, rel=1e-8)


class TestBoost:
    def test_identity(self):
        pt = PhasePoint.real([2.0], [4.0])
        out = lorentz_boost(pt, 1.0)
        assert out.q[0] == 2.0 and out.p[0] == 4.0

    def test_rescaling(self):
        out = lorentz_boost(PhasePoint.real([2.0], [4.0]), 2.0)
        assert out.q[0] == 4.0 and out.p[0] == 2.0

    def test_group_law(self):
        pt = PhasePoint.paired([2 + 1j, 2 - 1j], [4 + 0.5j, 4 - 0.5j], pairs=[(0, 1)])
        a = lorentz_boost(lorentz_boost(pt, 1.7), 0.4)
        b = lorentz_boost(pt, 1.7 * 0.4)
        assert np.allclose(a.q, b.q) and np.allclose(a.p, b.p)

    def test_rejects_nonpositive(self):
        with pytest.raises(NonPositiveLambda):
            lorentz_boost(PhasePoint.real([1.0], [1.0]), -2.0)

    def test_preserves_validity(self):
        pt = PhasePoint.paired([2 + 1j, 2 - 1j], [4 + 0.5j, 4 - 0.5j], pairs=[(0, 1)])
        validate(lorentz_boost(pt, 3.0))
