import numpy as np
import pytest

from cdlab._szego import alpha_from_moments, moments_from_alpha
from cdlab.errors import SpecError
from cdlab.measures import (
    CircleAtoms,
    CircleVerblunsky,
    CircleWeighted,
    moment,
    quadrature_rule,
)
from cdlab.harness import random_measure
from cdlab.numerics import newton_power_sums
from cdlab.opuc import (
    VerblunskyData,
    balayage_zero_moment,
    cd_kernel_diag_circle,
    cd_measure_moment_circle,
    circle_prufer_phase,
    eval_szego,
    monic_coefficients,
    opuc_zeros,
    poisson_sum,
    prufer_identity_residuals,
    szego_table,
    verblunsky_from_measure,
)

from _oracles import poisson_moment

FREE = VerblunskyData(alpha=np.zeros(8, dtype=complex))
HALF = VerblunskyData(alpha=np.array([-0.5 + 0j]))
UNIFORM = CircleWeighted(family="uniform")


class TestVerblunskyFromMeasure:
    def test_uniform_gives_zero_coefficients(self):
        v = verblunsky_from_measure(UNIFORM, 6)
        assert np.allclose(v.alpha, 0)

    def test_round_trip_identity(self):
        spec = CircleVerblunsky(alpha=[0.3 + 0.1j, -0.2 + 0.4j])
        v = verblunsky_from_measure(spec, 2)
        assert np.allclose(v.alpha, spec.alpha)
        padded = verblunsky_from_measure(spec, 5)
        assert np.allclose(padded.alpha[2:], 0)

    def test_vanishing_at_one_weight(self):
        # w proportional to |1 - e^{i theta}|^2, i.e. 1 - cos(theta):
        # the classical alpha_j = -1/(j + 2) family
        spec = CircleWeighted(family="poly-trig", coefficients=[1.0, -0.5])
        v = verblunsky_from_measure(spec, 6)
        assert np.abs(v.alpha - [-1 / (j + 2) for j in range(6)]).max() < 1e-12

    def test_vanishing_at_minus_one_weight(self):
        # the mirrored weight 1 + cos(theta) alternates the sign
        spec = CircleWeighted(family="poly-trig", coefficients=[1.0, 0.5])
        v = verblunsky_from_measure(spec, 6)
        target = [(-1) ** j / (j + 2) for j in range(6)]
        assert np.abs(v.alpha - target).max() < 1e-12

    def test_levinson_on_exact_moments_oracle(self):
        c = np.zeros(7, dtype=complex)
        c[0], c[1] = 1.0, -0.5
        alpha = alpha_from_moments(c, 6)
        assert np.abs(alpha - [-1 / (j + 2) for j in range(6)]).max() < 1e-12

    def test_levinson_moment_round_trip(self):
        rng = np.random.default_rng(2)
        alpha = 0.6 * rng.uniform(0.1, 1, 12) * np.exp(2j * np.pi * rng.uniform(0, 1, 12))
        c = moments_from_alpha(alpha, 12)
        back = alpha_from_moments(c, 12)
        assert np.abs(back - alpha).max() < 1e-10

    def test_atoms_exhaust_with_named_index(self):
        spec = CircleAtoms(angles=[0.0, 2.0, 4.0], weights=[0.3, 0.3, 0.4])
        v = verblunsky_from_measure(spec, 2)
        assert len(v.alpha) == 2
        with pytest.raises(SpecError):
            verblunsky_from_measure(spec, 3)


class TestEvalSzego:
    def test_free_case_is_monomial(self):
        z = np.exp(0.7j)
        vals = eval_szego(FREE, z, 5)
        assert np.abs(vals.values - z ** np.arange(6)).max() < 1e-14
        assert np.abs(vals.reversed_values - 1.0).max() < 1e-14

    def test_degree_zero(self):
        vals = eval_szego(HALF, 0.3 + 0.1j, 0)
        assert vals.values[0] == 1.0 and vals.reversed_values[0] == 1.0

    def test_one_step_closed_form(self):
        z = 0.2 - 0.7j
        vals = eval_szego(HALF, z, 1)
        kappa1 = 2.0 / np.sqrt(3.0)
        assert abs(vals.values[1] - kappa1 * (z + 0.5)) < 1e-14
        assert abs(vals.reversed_values[1] - kappa1 * (1 + 0.5 * z)) < 1e-14

    def test_modulus_match_on_circle(self):
        rng = np.random.default_rng(5)
        alpha = 0.5 * rng.uniform(0, 1, 15) * np.exp(2j * np.pi * rng.uniform(0, 1, 15))
        v = VerblunskyData(alpha=alpha)
        z = np.exp(1j * np.linspace(0, 2 * np.pi, 101))
        p, ps = szego_table(v, z, 15)
        assert np.abs(np.abs(p[15]) - np.abs(ps[15])).max() < 1e-12

    def test_reversed_polynomial_zero_free_on_disk(self):
        rng = np.random.default_rng(8)
        alpha = 0.5 * rng.uniform(0, 1, 12) * np.exp(2j * np.pi * rng.uniform(0, 1, 12))
        v = VerblunskyData(alpha=alpha)
        for radius in (1.0, 0.99):
            z = radius * np.exp(1j * np.linspace(0, 2 * np.pi, 512))
            _, ps = szego_table(v, z, 12)
            assert np.abs(ps[12]).min() > 0.0


class TestCdKernelCircle:
    def test_free_kernel_counts_terms(self):
        for theta in (0.0, 1.1, 4.0):
            assert abs(cd_kernel_diag_circle(FREE, theta, 4) - 5.0) < 1e-13

    def test_degree_zero(self):
        assert cd_kernel_diag_circle(HALF, 0.4, 0) == 1.0

    def test_half_example(self):
        assert abs(cd_kernel_diag_circle(HALF, 0.0, 1) - 4.0) < 1e-13


class TestOpucZeros:
    def test_free_zeros_at_origin(self):
        assert np.allclose(opuc_zeros(FREE, 3), 0)

    def test_one_step(self):
        assert np.allclose(opuc_zeros(HALF, 1), [-0.5])

    def test_random_zeros_stay_inside(self):
        spec = random_measure("circle", 22, seed=42)
        v = verblunsky_from_measure(spec, 21)
        zeros = opuc_zeros(v, 20)
        assert len(zeros) == 20
        assert np.abs(zeros).max() < 1.0
        poly = monic_coefficients(v, 20)
        scaled = np.abs(poly(zeros)) / np.maximum(1.0, np.abs(zeros)) ** 20
        assert scaled.max() < 1e-10

    def test_power_sums_cross_check(self):
        spec = random_measure("circle", 16, seed=1)
        v = verblunsky_from_measure(spec, 15)
        zeros = opuc_zeros(v, 15)
        sums = np.array([np.sum(zeros**k) for k in range(1, 9)])
        newton = newton_power_sums(monic_coefficients(v, 15), 8)
        assert np.abs(sums - newton).max() < 1e-8


class TestCdMeasureMomentCircle:
    def test_free_measure_is_invariant(self):
        for k in range(1, 6):
            assert abs(cd_measure_moment_circle(UNIFORM, FREE, 4, k)) < 1e-14

    def test_mass(self):
        spec = CircleVerblunsky(alpha=[-0.5 + 0j])
        v = verblunsky_from_measure(spec, 4)
        assert abs(cd_measure_moment_circle(spec, v, 3, 0) - 1.0) < 1e-12

    def test_half_first_moment_via_quadrature_oracle(self):
        # mu = Bernstein-Szego measure of alpha_0 = -1/2; moment(1) = -1/2
        # (high-resolution trapezoid on the explicit weight)
        spec = CircleVerblunsky(alpha=[-0.5 + 0j])
        theta = 2 * np.pi * np.arange(1 << 16) / (1 << 16)
        weight = 0.75 / (1.25 + np.cos(theta))
        oracle = np.mean(np.exp(1j * theta) * weight)
        assert abs(oracle - (-0.5)) < 1e-12
        v = verblunsky_from_measure(spec, 1)
        got = cd_measure_moment_circle(spec, v, 0, 1)
        assert abs(got - oracle) < 1e-10


class TestSweptZeroMoments:
    def test_origin_zeros(self):
        assert balayage_zero_moment(np.zeros(4, complex), 3) == 0

    def test_mass(self):
        assert balayage_zero_moment(np.array([0.1 + 0.2j]), 0) == 1.0

    def test_half_squared_with_poisson_oracle(self):
        val = balayage_zero_moment(np.array([-0.5 + 0j]), 2)
        assert abs(val - 0.25) < 1e-15
        oracle = poisson_moment([-0.5 + 0j], [1.0], 1.0, 2)
        assert abs(val - oracle) < 1e-10

    def test_rejects_outside_disk(self):
        from cdlab.errors import InvariantViolation

        with pytest.raises(InvariantViolation):
            balayage_zero_moment(np.array([1.0 + 0j]), 1)

    def test_swept_density_channel(self):
        # mean power sums equal quadrature against the Poisson sum density
        spec = random_measure("circle", 9, seed=11)
        v = verblunsky_from_measure(spec, 8)
        zeros = opuc_zeros(v, 8)
        theta = 2 * np.pi * np.arange(1 << 14) / (1 << 14)
        dens = poisson_sum(zeros, theta) / len(zeros)
        for k in range(6):
            quad = np.mean(np.exp(1j * k * theta) * dens)
            assert abs(quad - balayage_zero_moment(zeros, k)) < 1e-9


class TestCirclePrufer:
    def test_free_phase_is_linear(self):
        grid = np.linspace(0, 2 * np.pi, 513)
        _, eta = circle_prufer_phase(FREE, 3, grid)
        ramp = eta[0] + 4.0 * grid
        assert np.abs(eta - ramp).max() < 1e-12

    @pytest.mark.parametrize("seed,n", [(3, 2), (4, 6), (9, 11)])
    def test_winding_number(self, seed, n):
        spec = random_measure("circle", n + 2, seed=seed)
        v = verblunsky_from_measure(spec, n + 1)
        grid, eta = circle_prufer_phase(v, n)
        assert abs((eta[-1] - eta[0]) - 2 * np.pi * (n + 1)) < 1e-8

    def test_strictly_increasing(self):
        spec = random_measure("circle", 8, seed=21)
        v = verblunsky_from_measure(spec, 7)
        grid, eta = circle_prufer_phase(v, 6)
        assert np.diff(eta).min() > 0

    def test_moebius_closed_form(self):
        # e^{i eta_0} = (z + 1/2)/(1 + z/2): eta_0 = theta - 2 atan(...)
        grid = np.linspace(0, 2 * np.pi, 1025)
        _, eta = circle_prufer_phase(HALF, 0, grid)
        closed = grid - 2.0 * np.arctan(0.5 * np.sin(grid) / (1 + 0.5 * np.cos(grid)))
        shift = eta[0] - closed[0]
        assert abs(shift / (2 * np.pi) - round(shift / (2 * np.pi))) < 1e-12
        assert np.abs(eta - closed - shift).max() < 1e-12


class TestPruferIdentities:
    def test_free_case_exact(self):
        r1, r2 = prufer_identity_residuals(FREE, None, 4, grid_points=1 << 10)
        assert r1 < 1e-10 and r2 < 1e-10

    def test_moebius_case(self):
        r1, r2 = prufer_identity_residuals(HALF, None, 0, grid_points=1 << 12)
        assert r1 <= 1e-6 and r2 <= 1e-6

    def test_second_order_stencil(self):
        # halving the step divides the finite-difference error by about 4
        spec = random_measure("circle", 6, seed=13)
        v = verblunsky_from_measure(spec, 5)
        r1a, _ = prufer_identity_residuals(v, None, 4, grid_points=1 << 10)
        r1b, _ = prufer_identity_residuals(v, None, 4, grid_points=1 << 11)
        assert 2.5 < r1a / r1b < 5.5

    def test_swept_measure_factorization(self):
        # the swept zero measure has density K_n/(n+1) against the
        # Bernstein-Szego measure: check moments through both routes
        spec = random_measure("circle", 9, seed=17)
        v = verblunsky_from_measure(spec, 8)
        n = 7
        zeros = opuc_zeros(v, n + 1)
        bs = CircleVerblunsky(alpha=np.asarray(v.alpha[: n + 1]))
        rule = quadrature_rule(bs, degree=n + 10)
        z = np.asarray(rule.nodes)
        p, _ = szego_table(v, z, n)
        kern = (np.abs(p) ** 2).sum(axis=0) / (n + 1)
        for k in range(11):
            via_density = (rule.weights * z**k * kern).sum()
            via_power = balayage_zero_moment(zeros, k)
            assert abs(via_density - via_power) < 1e-8

    def test_circle_moment_bound(self):
        spec = random_measure("circle", 30, seed=42)
        v = verblunsky_from_measure(spec, 29)
        n = 28
        bs_rule = quadrature_rule(CircleVerblunsky(alpha=np.asarray(v.alpha[: n + 1])), degree=n + 8)
        mu_rule = quadrature_rule(spec, degree=n + 8)
        zmu = np.asarray(mu_rule.nodes)
        pmu, _ = szego_table(v, zmu, n)
        kern = (np.abs(pmu) ** 2).sum(axis=0) / (n + 1)
        zeros = opuc_zeros(v, n + 1)
        for k in range(1, 9):
            mu_k = (mu_rule.weights * zmu**k * kern).sum()
            nu_k = balayage_zero_moment(zeros, k)
            assert abs(mu_k - nu_k) <= 2 * k / (n + 1) + 1e-8
