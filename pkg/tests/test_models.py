import numpy as np
import pytest

from conftest import brute_det
from zerodyn.errors import DegenerateMomenta, InvalidPoint, NotFactorizable
from zerodyn.models import (
    CharacteristicCM,
    CharacteristicRS,
    KdVDeterminant,
    PolynomialProduct,
    RelativisticPolynomialPair,
    SinhGordonDeterminant,
    SinhPair,
    build_W,
    eval_f,
    eval_f_dx,
    eval_factors,
    factor_values,
    generating_values,
)
from zerodyn.phase_space import PhasePoint


class TestEvalF:
    def test_polynomial_quarter_convention(self):
        m = PolynomialProduct(C=9.0, n=2)
        pt = PhasePoint.real([3.0, -1.0], [1.0, -1.0])
        val, resid = eval_f(m, pt, 0.0)
        assert val == pytest.approx(-5.25)
        assert resid <= 1e-9

    def test_kdv_single_antisoliton_zero(self):
        m = KdVDeterminant(n=1)
        pt = PhasePoint.real([0.0], [2.0], epsilon=[-1])
        val, _ = eval_f(m, pt, 0.0)
        assert val == pytest.approx(0.0, abs=1e-14)

    def test_sinh_zero_factor(self):
        m = SinhPair(C=0.0)
        pt = PhasePoint.real([1.0, 2.0], [0.0, 0.0])
        val, _ = eval_f(m, pt, 1.0)
        assert val == pytest.approx(0.0, abs=1e-14)

    def test_invalid_point_rejected(self):
        m = KdVDeterminant(n=1)
        with pytest.raises(InvalidPoint):
            eval_f(m, PhasePoint.real([0.0], [-2.0]), 0.0)

    def test_imag_residue_small_for_paired_input(self):
        rng = np.random.default_rng(5)
        m = PolynomialProduct(C=3.0, n=4, quarter=False)
        for _ in range(25):
            z = rng.normal(size=2) + 1j * rng.normal(size=2)
            w = rng.normal(size=2) + 1j * rng.normal(size=2)
            pt = PhasePoint.paired(
                [z[0], z[0].conjugate(), rng.normal(), rng.normal()],
                [w[0], w[0].conjugate(), rng.normal(), rng.normal()],
                pairs=[(0, 1)],
            )
            val, resid = eval_f(m, pt, float(rng.normal()))
            assert resid <= 1e-9 * max(1.0, abs(val))


class TestFactors:
    def test_single_antisoliton_factors(self):
        m = KdVDeterminant(n=1)
        pt = PhasePoint.real([0.0], [2.0], epsilon=[-1])
        plus, minus = eval_factors(m, pt, 0.0)
        assert plus == pytest.approx(0.0, abs=1e-14)
        assert minus == pytest.approx(-2.0)

    def test_product_of_factors_is_eval_f(self):
        rng = np.random.default_rng(1)
        m = SinhGordonDeterminant(n=2)
        for _ in range(100):
            pt = PhasePoint.real(rng.normal(size=2), rng.uniform(0.3, 2.0, size=2))
            x = float(rng.normal() * 2)
            plus, minus = eval_factors(m, pt, x)
            val, _ = eval_f(m, pt, x)
            assert plus * minus == pytest.approx(val, rel=1e-12, abs=1e-12)

    def test_breather_factors_real_at_real_x(self):
        m = KdVDeterminant(n=2)
        p1 = 0.9 + 0.7j
        pt = PhasePoint.paired([0.2 + 0.1j, 0.2 - 0.1j], [p1, p1.conjugate()], pairs=[(0, 1)])
        vals = factor_values(m, pt.q, pt.p, pt.epsilon, np.linspace(-2, 2, 17))
        for v in vals:
            assert np.max(np.abs(v.imag)) <= 1e-9 * np.max(np.abs(v))

    def test_non_factorizable_model(self):
        with pytest.raises(NotFactorizable):
            eval_factors(PolynomialProduct(C=1.0, n=2), PhasePoint.real([0, 1], [0, 0]), 0.0)


class TestEvalFDx:
    def test_polynomial_product_rule(self):
        m = PolynomialProduct(C=9.0, n=2)
        pt = PhasePoint.real([3.0, -1.0], [1.0, -1.0])
        assert eval_f_dx(m, pt, 0.0) == pytest.approx(-2.0)

    def test_analytic_matches_finite_difference(self):
        rng = np.random.default_rng(2)
        h = 1e-6
        for m, n in [
            (PolynomialProduct(C=2.5, n=3, quarter=False), 3),
            (SinhPair(C=0.7), 2),
            (CharacteristicCM(gamma=0.8), 3),
            (RelativisticPolynomialPair(C=1.5), 2),
        ]:
            for _ in range(25):
                q = rng.normal(size=n) * 2
                p = rng.uniform(0.4, 2.0, size=n) * rng.choice([-1, 1], size=n)
                while n > 1 and np.min(np.abs(np.subtract.outer(p, p) + np.eye(n))) < 0.05:
                    p = rng.uniform(0.4, 2.0, size=n) * rng.choice([-1, 1], size=n)
                pt = PhasePoint.real(q, p)
                x = float(rng.normal())
                fd = (eval_f(m, pt, x + h)[0] - eval_f(m, pt, x - h)[0]) / (2 * h)
                assert eval_f_dx(m, pt, x) == pytest.approx(fd, rel=1e-6, abs=1e-6)

    def test_nonzero_slope_at_simple_root(self):
        m = PolynomialProduct(C=9.0, n=2)
        pt = PhasePoint.real([3.0, -1.0], [1.0, -1.0])
        assert abs(eval_f_dx(m, pt, 3.5)) > 0.1


class TestBuildW:
    def test_cm_entries(self):
        w = build_W("cm", [1.0, -1.0], 1.0)
        assert np.allclose(w, [[0.0, 0.5], [-0.5, 0.0]])

    def test_rs_entries(self):
        w = build_W("rs", [1.0, -1.0], 1.0)
        assert np.allclose(w, [[0.0, 0.5], [0.5, 0.0]])

    def test_degenerate_momenta_rejected(self):
        with pytest.raises(DegenerateMomenta):
            build_W("cm", [1.0, 1.0], 1.0)

    def test_cm_pair_determinant_identity(self):
        # det(Q + W - xI) = (q1 - x)(q2 - x) + gamma^2 / (p1 - p2)^2 at N=2
        rng = np.random.default_rng(3)
        m = CharacteristicCM(gamma=1.3)
        for _ in range(30):
            q = rng.normal(size=2) * 3
            p = rng.normal(size=2)
            if abs(p[0] - p[1]) < 0.1:
                continue
            pt = PhasePoint.real(q, p)
            x = float(rng.normal() * 2)
            expected = (q[0] - x) * (q[1] - x) + 1.3**2 / (p[0] - p[1]) ** 2
            assert eval_f(m, pt, x)[0] == pytest.approx(expected, rel=1e-12)

    def test_soliton_v_unit_diagonal(self):
        from zerodyn.models import _soliton_v

        rng = np.random.default_rng(4)
        p = rng.uniform(0.2, 2.0, size=4) + 1j * rng.normal(size=4) * 0.3
        v = _soliton_v(p)
        assert np.allclose(np.diag(v), 1.0)


class TestAgainstBruteForceDeterminant:
    def test_characteristic_value_matches_permutation_expansion(self):
        rng = np.random.default_rng(6)
        m = CharacteristicRS(gamma=0.7)
        for _ in range(20):
            q = rng.normal(size=3) * 2
            p = rng.uniform(0.3, 2.0, size=3) + np.array([0.0, 2.0, 4.0])
            pt = PhasePoint.real(q, p)
            x = float(rng.normal())
            w = build_W("rs", p, 0.7)
            ref = brute_det(w + np.diag(q - x)).real
            assert eval_f(m, pt, x)[0] == pytest.approx(ref, rel=1e-12, abs=1e-12)

    def test_kdv_factors_match_permutation_expansion(self):
        from zerodyn.models import _soliton_v

        rng = np.random.default_rng(7)
        m = KdVDeterminant(n=2)
        for _ in range(20):
            q = rng.normal(size=2)
            p = rng.uniform(0.4, 1.6, size=2)
            eps = rng.choice([-1, 1], size=2)
            pt = PhasePoint.real(q, p, epsilon=eps)
            x = float(rng.normal())
            v = _soliton_v(p.astype(complex))
            e0 = np.diag(eps * np.exp(2 * p * (x - q)))
            plus, minus = eval_factors(m, pt, x)
            # row-rescaled output differs by the same positive factor per row
            scale = np.prod(np.maximum(np.exp(2 * p * (x - q)), np.max(np.abs(v), axis=1)))
            assert plus * scale == pytest.approx(brute_det(e0 + v).real, rel=1e-10, abs=1e-12)
            assert minus * scale == pytest.approx(brute_det(e0 - v).real, rel=1e-10, abs=1e-12)


class TestTranslationCovariance:
    def test_shifting_q_and_x_together_is_invariant(self):
        rng = np.random.default_rng(8)
        cases = [
            (PolynomialProduct(C=1.5, n=3, quarter=False), 3, False),
            (SinhPair(C=0.6), 2, False),
            (CharacteristicCM(gamma=0.9), 2, False),
            (KdVDeterminant(n=2), 2, True),
        ]
        for m, n, positive_p in cases:
            for _ in range(10):
                q = rng.normal(size=n)
                p = rng.uniform(0.4, 1.8, size=n)
                if not positive_p:
                    p = p + np.arange(n)  # keep momenta distinct
                c = float(rng.normal() * 3)
                x = float(rng.normal())
                a = generating_values(m, q, p, np.ones(n), x)[0]
                b = generating_values(m, q + c, p, np.ones(n), x + c)[0]
                assert b == pytest.approx(a, rel=1e-9, abs=1e-12)

    def test_single_soliton_root_sits_at_q(self):
        from zerodyn.rootfind import find_real_roots

        m = KdVDeterminant(n=1)
        pt = PhasePoint.real([1.7], [0.9])
        roots = find_real_roots(m, pt).roots
        assert len(roots) == 1
        assert roots[0] == pytest.approx(1.7, abs=1e-12)

    def test_characteristic_leading_behavior(self):
        # degree-N monic polynomial up to sign (-1)^N: f ~ (-x)^N at large |x|
        m = CharacteristicCM(gamma=1.0)
        pt = PhasePoint.real([0.3, -0.4, 0.1], [1.0, 2.0, 3.0])
        for x in (1e3, -1e3):
            val, _ = eval_f(m, pt, x)
            assert val == pytest.approx((-x) ** 3, rel=1e-2)
