import math

import numpy as np
import pytest

from zerodyn.errors import NonFiniteValue, WindowTooSmall
from zerodyn.models import CharacteristicCM, PolynomialProduct
from zerodyn.phase_space import PhasePoint
from zerodyn.rootfind import RootFindOptions, find_real_roots, refine, scan_brackets


def bisect_oracle(f, lo, hi, iters=200):
    """Plain bisection, independent of the safeguarded-Newton path."""
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


class TestScanBrackets:
    def test_parabola_two_brackets(self):
        brackets, zeros, _ = scan_brackets(lambda x: x * x - 1, (-2, 2), 64)
        assert len(brackets) == 2 and not zeros

    def test_no_real_roots(self):
        brackets, zeros, _ = scan_brackets(lambda x: x * x + 1, (-2, 2), 64)
        assert brackets == [] and zeros == []

    def test_cubic_three_brackets(self):
        brackets, _, _ = scan_brackets(lambda x: x**3 - x, (-2, 2), 64)
        assert len(brackets) == 3

    def test_exact_grid_zeros_reported(self):
        brackets, zeros, _ = scan_brackets(lambda x: x**3 - x, (-2, 2), 101)
        assert len(brackets) + len(zeros) == 3
        assert zeros == [-1.0, 0.0, 1.0]

    def test_nonfinite_rejected(self):
        with pytest.raises(NonFiniteValue):
            with np.errstate(invalid="ignore", divide="ignore"):
                scan_brackets(lambda x: np.log(x - 0.5), (0, 1), 64)


class TestRefine:
    def test_sqrt2(self):
        opts = RootFindOptions(window=(-1, 3))
        root = refine(lambda x: x * x - 2, lambda x: 2 * x, (1.0, 2.0), opts)
        assert root == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_asinh_one_vs_bisection_oracle(self):
        f = lambda x: math.sinh(x) - 1
        expected = bisect_oracle(f, 0.0, 2.0)
        opts = RootFindOptions(window=(0, 2))
        root = refine(f, lambda x: math.cosh(x), (0.0, 2.0), opts)
        assert root == pytest.approx(expected, abs=1e-13)
        assert root == pytest.approx(0.881373587019543, abs=1e-12)

    def test_newton_converges_fast_on_monotone_bracket(self):
        calls = [0]

        def f(x):
            calls[0] += 1
            return x**3 + x - 11.0

        opts = RootFindOptions(window=(1, 3))
        root = refine(f, lambda x: 3 * x * x + 1, (1.0, 3.0), opts)
        assert abs(root**3 + root - 11.0) < 1e-9
        assert calls[0] <= 12  # bracket endpoints + quadratic convergence


class TestFindRealRoots:
    def test_polynomial_pair_roots(self):
        m = PolynomialProduct(C=9.0, n=2)
        pt = PhasePoint.real([3.0, -1.0], [1.0, -1.0])
        roots = find_real_roots(m, pt).roots
        assert np.allclose(roots, [-1.5, 3.5], atol=1e-10)

    def test_c_zero_decouples(self):
        m = PolynomialProduct(C=0.0, n=2)
        pt = PhasePoint.real([1.0, -1.0], [0.0, 0.0])
        roots = find_real_roots(m, pt).roots
        assert np.allclose(roots, [-1.0, 1.0], atol=1e-12)

    def test_cm_pair_no_real_roots(self):
        m = CharacteristicCM(gamma=1.0)
        pt = PhasePoint.real([0.0, 0.0], [1.0, -1.0])
        assert find_real_roots(m, pt).count == 0

    def test_explicit_window_too_small(self):
        m = PolynomialProduct(C=9.0, n=2)
        pt = PhasePoint.real([3.0, -1.0], [1.0, -1.0])
        with pytest.raises(WindowTooSmall):
            find_real_roots(m, pt, RootFindOptions(window=(-1.6, 3.5001), n_scan=64))

    def test_sign_change_within_tolerance_of_each_root(self):
        m = PolynomialProduct(C=4.0, n=3, quarter=False)
        pt = PhasePoint.real([-2.0, 0.3, 2.2], [0, 0, 0])
        rs = find_real_roots(m, pt)
        from zerodyn.models import root_function

        g = root_function(m, pt)
        for r in rs.roots:
            tol = 10 * (1e-12 + 1e-12 * abs(r))
            a = g(np.array([r - tol]))[0]
            b = g(np.array([r + tol]))[0]
            assert a * b < 0

    def test_doubling_scan_never_loses_roots(self):
        cases = [
            (PolynomialProduct(C=9.0, n=2), PhasePoint.real([3.0, -1.0], [1, -1])),
            (PolynomialProduct(C=-4.0, n=2), PhasePoint.real([2.5, -2.5], [0, 0])),
            (CharacteristicCM(gamma=0.8), PhasePoint.real([-3.0, 3.0], [0.5, -0.4])),
        ]
        for m, pt in cases:
            counts = [
                find_real_roots(m, pt, RootFindOptions(n_scan=n)).count
                for n in (256, 512, 1024, 2048)
            ]
            assert all(b >= a for a, b in zip(counts, counts[1:]))

    def test_quadratic_formula_on_random_pairs(self):
        rng = np.random.default_rng(11)
        worst = 0.0
        checked = 0
        while checked < 1000:
            q = np.sort(rng.uniform(-4, 4, 2))[::-1]
            C = rng.uniform(-6, 6)
            disc = (q[0] - q[1]) ** 2 + C
            if disc <= 1e-3:
                continue
            m = PolynomialProduct(C=C, n=2)
            pt = PhasePoint.real(q, [0.0, 1.0])
            roots = find_real_roots(m, pt).roots
            s = q[0] + q[1]
            expected = np.sort([(s - np.sqrt(disc)) / 2, (s + np.sqrt(disc)) / 2])
            assert len(roots) == 2
            worst = max(worst, float(np.max(np.abs(roots - expected))))
            checked += 1
        assert worst < 1e-10
