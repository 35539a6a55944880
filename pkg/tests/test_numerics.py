import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdlab.config import DEFAULT_TOL
from cdlab.errors import GridTooCoarseError
from cdlab.numerics import (
    ComplexPolynomial,
    TridiagonalSymmetric,
    aberth_roots,
    newton_power_sums,
    periodic_quadrature,
    realline_quadrature,
    symtridiag_eigen,
    unwrap_phase,
    unwrap_phase_adaptive,
)

from _oracles import brute_power_sums, dense_first_components, sturm_eigenvalues


def chebyshev_tridiag(n):
    off = np.full(n - 1, 0.5)
    if n > 1:
        off[0] = 1.0 / np.sqrt(2.0)
    return TridiagonalSymmetric(diag=np.zeros(n), offdiag=off)


class TestSymtridiagEigen:
    def test_exchange_2x2(self):
        ev, w = symtridiag_eigen(TridiagonalSymmetric(diag=[0, 0], offdiag=[1]))
        assert np.allclose(ev, [-1, 1], atol=1e-15)
        assert np.allclose(w, [0.5, 0.5], atol=1e-15)

    def test_single_entry(self):
        ev, w = symtridiag_eigen(TridiagonalSymmetric(diag=[0.7], offdiag=[]))
        assert ev.tolist() == [0.7] and w.tolist() == [1.0]

    @pytest.mark.parametrize("n", [3, 8, 25])
    def test_chebyshev_nodes_closed_form_and_bisection(self, n):
        # zeros of the degree-n first-kind polynomial, equal 1/n weights
        t = chebyshev_tridiag(n)
        ev, w = symtridiag_eigen(t)
        exact = np.sort(np.cos((2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n)))
        assert np.abs(ev - exact).max() < 1e-13
        assert np.abs(w - 1.0 / n).max() < 1e-13
        oracle = sturm_eigenvalues(t.diag, t.offdiag)
        assert np.abs(ev - oracle).max() < 1e-12

    def test_eigenvalues_match_dense_solver(self):
        rng = np.random.default_rng(5)
        t = TridiagonalSymmetric(diag=rng.normal(size=40), offdiag=rng.uniform(0.2, 1.5, 39))
        ev, w = symtridiag_eigen(t)
        dev, dw = dense_first_components(t.diag, t.offdiag)
        scale = max(np.abs(t.diag).max(), t.offdiag.max())
        assert np.abs(ev - dev).max() <= 1e-12 * scale
        assert np.abs(w - dw).max() < 1e-11

    def test_weights_sum_and_first_moment(self):
        rng = np.random.default_rng(11)
        t = TridiagonalSymmetric(diag=rng.normal(size=30), offdiag=rng.uniform(0.1, 1.0, 29))
        ev, w = symtridiag_eigen(t)
        assert abs(w.sum() - 1.0) <= 1e-12
        assert abs((ev * w).sum() - t.diag[0]) <= 1e-10

    @given(
        diag=st.lists(st.floats(-2, 2), min_size=2, max_size=12),
        off=st.lists(st.floats(0.05, 1.5), min_size=1, max_size=11),
    )
    @settings(max_examples=40, deadline=None)
    def test_leading_blocks_interlace(self, diag, off):
        n = min(len(diag) - 1, len(off))
        if n < 1:
            return
        diag, off = np.array(diag[: n + 1]), np.array(off[:n])
        small, _ = symtridiag_eigen(TridiagonalSymmetric(diag=diag[:n], offdiag=off[: n - 1]))
        big, _ = symtridiag_eigen(TridiagonalSymmetric(diag=diag, offdiag=off))
        # interlacing big_0 < small_0 < big_1 < ...; strict gaps can fall
        # below double resolution for weakly coupled blocks, so allow
        # machine-scale slack
        slack = 1e-12 * (np.abs(diag).max() + off.max())
        for i in range(n):
            assert big[i] < small[i] + slack
            assert small[i] < big[i + 1] + slack

    def test_rejects_nonpositive_offdiag(self):
        with pytest.raises(ValueError):
            TridiagonalSymmetric(diag=[0, 0], offdiag=[0.0])


class TestAberth:
    def test_roots_of_unity_shift(self):
        roots = aberth_roots(ComplexPolynomial([1, 0, 1]))
        assert np.allclose(sorted(roots.imag), [-1, 1], atol=1e-13)
        assert np.allclose(roots.real, 0, atol=1e-13)

    def test_triple_origin(self):
        assert np.allclose(aberth_roots(ComplexPolynomial([0, 0, 0, 1])), 0)

    def test_szego_one_step(self):
        # first monic circle polynomial for alpha_0 = -1/2 is z + 1/2
        roots = aberth_roots(ComplexPolynomial([0.5, 1.0]))
        assert np.allclose(roots, [-0.5])

    def test_nondecreasing_modulus_order(self):
        roots = aberth_roots(ComplexPolynomial([6, -11, 6, -1]))  # roots 1, 2, 3
        assert np.allclose(np.abs(roots), [1, 2, 3], atol=1e-10)

    def test_double_root(self):
        # (z - 1)^2 (z + 2) = z^3 - 3z + 2
        roots = aberth_roots(ComplexPolynomial([2, -3, 0, 1]))
        assert np.abs(np.sort(roots.real) - [-2, 1, 1]).max() < 1e-5
        p = ComplexPolynomial([2, -3, 0, 1])
        scaled = np.abs(p(roots)) / np.maximum(1, np.abs(roots)) ** 3
        assert scaled.max() < DEFAULT_TOL.aberth_target * 10

    def test_residual_postcondition(self):
        rng = np.random.default_rng(0)
        c = rng.uniform(-1, 1, 41) + 1j * rng.uniform(-1, 1, 41)
        p = ComplexPolynomial(c)
        roots = aberth_roots(p)
        scaled = np.abs(p(roots)) / (abs(p.leading) * np.maximum(1, np.abs(roots)) ** p.degree)
        assert scaled.max() <= 1e-10

    @given(data=st.data())
    @settings(max_examples=25, deadline=None)
    def test_power_sums_match_newton(self, data):
        deg = data.draw(st.integers(2, 30))
        re = data.draw(st.lists(st.floats(-1, 1), min_size=deg, max_size=deg))
        im = data.draw(st.lists(st.floats(-1, 1), min_size=deg, max_size=deg))
        coeffs = np.array(re) + 1j * np.array(im)
        coeffs = np.concatenate([coeffs, [1.0 + 0j]])  # monic
        p = ComplexPolynomial(coeffs)
        if p.degree < 1:
            return
        roots = aberth_roots(p)
        sums = brute_power_sums(roots, 10)
        newton = newton_power_sums(p.monic(), 10)
        scale = np.maximum(1.0, np.abs(newton))
        assert (np.abs(sums - newton) / scale).max() < 1e-8


class TestNewtonPowerSums:
    def test_difference_of_squares(self):
        s = newton_power_sums(ComplexPolynomial([-1, 0, 1]), 2)
        assert np.allclose(s, [0, 2])

    def test_pure_power(self):
        s = newton_power_sums(ComplexPolynomial([0, 0, 0, 0, 1]), 6)
        assert np.allclose(s, 0)

    def test_factored_quadratic(self):
        s = newton_power_sums(ComplexPolynomial([2, -3, 1]), 3)
        assert np.allclose(s, [3, 5, 9])

    def test_requires_monic(self):
        with pytest.raises(ValueError):
            newton_power_sums(ComplexPolynomial([1, 2]), 2)


class TestPeriodicQuadrature:
    def test_constant(self):
        assert periodic_quadrature(np.ones(7)) == 1

    def test_first_harmonic(self):
        theta = 2 * np.pi * np.arange(5) / 5
        assert abs(periodic_quadrature(np.exp(1j * theta))) < 1e-15

    def test_squared_modulus(self):
        theta = 2 * np.pi * np.arange(9) / 9
        val = periodic_quadrature(np.abs(1 + np.exp(1j * theta)) ** 2)
        assert abs(val - 2) < 1e-14

    @pytest.mark.parametrize("m", [4, 9, 32])
    def test_exactness_below_node_count(self, m):
        theta = 2 * np.pi * np.arange(m) / m
        for k in range(-(m - 1), m):
            val = periodic_quadrature(np.exp(1j * k * theta))
            target = 1.0 if k == 0 else 0.0
            assert abs(val - target) <= 1e-13


class TestReallineQuadrature:
    def test_cauchy_mass(self):
        f = lambda x: 1.0 / (np.pi * (1 + x**2))
        assert abs(realline_quadrature(f, 32, 1.0) - 1) < 1e-10

    def test_odd_integrand(self):
        f = lambda x: x / (np.pi * (1 + x**2) ** 2)
        assert abs(realline_quadrature(f, 64, 1.0)) < 1e-14

    def test_shifted_cauchy_is_second_kind_base_case(self):
        # density of the index-0 second-kind measure with b_1 = 0.3
        f = lambda x: 1.0 / (np.pi * (1 + (x - 0.3) ** 2))
        assert abs(realline_quadrature(f, 256, 1.0) - 1) < 1e-10

    def test_scaled_cauchy(self):
        f = lambda x: 2.0 / (np.pi * (4 + x**2))
        assert abs(realline_quadrature(f, 16, 2.0) - 1) < 1e-12

    def test_nan_propagates(self):
        from cdlab.errors import IntegrationError

        def bad(x):
            out = np.asarray(1.0 / (np.pi * (1 + x**2)))
            out = np.where(x > 5, np.nan, out)
            return out

        with pytest.raises(IntegrationError):
            realline_quadrature(bad, 64, 1.0)


class TestUnwrapPhase:
    def test_linear_ramp(self):
        grid = np.linspace(0, 2 * np.pi, 100)
        out = unwrap_phase(np.exp(1j * grid))
        assert np.abs(out - grid).max() < 1e-12

    def test_constant(self):
        assert np.allclose(unwrap_phase(np.ones(10)), 0)

    def test_double_winding(self):
        grid = np.linspace(0, 2 * np.pi, 300)
        out = unwrap_phase(np.exp(2j * grid))
        assert abs(out[-1] - out[0] - 4 * np.pi) < 1e-12

    def test_start_in_principal_range(self):
        out = unwrap_phase(np.exp(1j * np.linspace(-0.5, 0.5, 10)))
        assert 0 <= out[0] < 2 * np.pi

    def test_too_coarse(self):
        with pytest.raises(GridTooCoarseError) as err:
            unwrap_phase(np.array([1.0, -1.0, 1.0]))
        assert err.value.index == 1

    @given(
        deg=st.integers(1, 6),
        shift=st.floats(-0.8, 0.8),
    )
    @settings(max_examples=30, deadline=None)
    def test_closed_loop_winding_is_integer(self, deg, shift):
        grid = np.linspace(0, 2 * np.pi, 4096 + 1)
        vals = (np.exp(1j * grid) - shift) ** deg
        out = unwrap_phase(vals)
        winding = (out[-1] - out[0]) / (2 * np.pi)
        assert abs(winding - round(winding)) < 1e-9

    def test_adaptive_refines_coarse_grid(self):
        # 3 points per turn is too coarse for plain unwrapping
        grid = np.linspace(0, 2 * np.pi, 4)
        fn = lambda t: np.exp(1j * np.asarray(t))
        out = unwrap_phase_adaptive(fn, grid)
        assert abs(out[-1] - out[0] - 2 * np.pi) < 1e-12
