import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdlab.errors import DegreeCapError, SpecError
from cdlab.measures import (
    CircleAtoms,
    CircleVerblunsky,
    CircleWeighted,
    MomentVector,
    RealAtoms,
    RealWeighted,
    from_json,
    inner_product,
    moment,
    moment_vector,
    quadrature_rule,
    require_degree,
    spec_hash,
    support_radius,
    to_json,
    to_json_dict,
)

from _oracles import chebyshev_moment

UNIFORM = CircleWeighted(family="uniform")
CHEB = RealWeighted(interval=(-1.0, 1.0), family="chebyshev-first-kind")
LEG = RealWeighted(interval=(-1.0, 1.0), family="legendre-uniform")


class TestSupportRadius:
    def test_uniform_circle(self):
        assert support_radius(UNIFORM) == 1.0

    def test_atoms(self):
        assert support_radius(RealAtoms(nodes=[-1, 1], weights=[0.5, 0.5])) == 1.0

    def test_interval_endpoint(self):
        spec = RealWeighted(interval=(-2.0, 3.0), family="chebyshev-first-kind")
        assert support_radius(spec) == 3.0


class TestMoment:
    def test_k_zero_is_exact_one(self):
        for spec in (UNIFORM, CHEB, LEG, RealAtoms(nodes=[0.2], weights=[1.0])):
            assert moment(spec, 0) == 1.0

    def test_uniform_moments_vanish(self):
        # arclength measure: every positive moment is zero
        for k in range(1, 8):
            assert moment(UNIFORM, k) == 0

    def test_chebyshev_k2(self):
        assert abs(moment(CHEB, 2) - 0.5) < 1e-13
        assert abs(moment(CHEB, 2) - chebyshev_moment(2)) < 1e-10

    @pytest.mark.parametrize("k", [1, 3, 4, 6, 8])
    def test_chebyshev_against_substitution_oracle(self, k):
        assert abs(moment(CHEB, k) - chebyshev_moment(k)) < 1e-10

    def test_legendre_moments(self):
        # floor set by summing a 2048-point rule, not by the rule itself
        for k in range(8):
            exact = 0.0 if k % 2 else 1.0 / (k + 1)
            assert abs(moment(LEG, k) - exact) < 1e-12

    def test_atoms_two_ways(self):
        spec = RealAtoms(nodes=[-0.5, 0.1, 0.9], weights=[0.25, 0.25, 0.5])
        rule = quadrature_rule(spec)
        for k in range(6):
            direct = (rule.weights * rule.nodes**k).sum()
            assert abs(moment(spec, k) - direct) <= 1e-15

    def test_polytrig_closed_form_vs_quadrature(self):
        spec = CircleWeighted(family="poly-trig", coefficients=[1.0, -0.5])
        rule = quadrature_rule(spec, degree=8)
        for k in range(6):
            quad = (rule.weights * rule.nodes**k).sum()
            assert abs(moment(spec, k) - quad) < 1e-10

    def test_verblunsky_recursion_vs_quadrature(self):
        spec = CircleVerblunsky(alpha=[-0.5 + 0j, 0.2 + 0.1j])
        rule = quadrature_rule(spec, degree=8)
        for k in range(8):
            quad = (rule.weights * rule.nodes**k).sum()
            assert abs(moment(spec, k) - quad) < 1e-10

    def test_hermitian_moments(self):
        spec = CircleVerblunsky(alpha=[0.3 + 0.2j, -0.1 + 0.4j])
        rule = quadrature_rule(spec, degree=6)
        for k in range(1, 6):
            negative = (rule.weights * rule.nodes ** (-k)).sum()
            assert abs(negative - np.conj(moment(spec, k))) < 1e-10

    @given(
        nodes=st.lists(st.floats(-1, 1), min_size=2, max_size=8, unique=True),
        k=st.integers(0, 12),
    )
    @settings(max_examples=50, deadline=None)
    def test_moment_bound(self, nodes, k):
        w = np.full(len(nodes), 1.0 / len(nodes))
        spec = RealAtoms(nodes=nodes, weights=w)
        n_mu = support_radius(spec)
        assert abs(moment(spec, k)) <= n_mu**k + 1e-12


class TestMomentVector:
    def test_builds_and_validates(self):
        mv = moment_vector(CHEB, 6)
        assert mv[0] == 1.0 and mv.k_max == 6

    def test_rejects_bad_first_entry(self):
        with pytest.raises(SpecError):
            MomentVector(1, [0.5, 0.1])


class TestInnerProduct:
    def test_total_mass(self):
        one = lambda x: np.ones_like(np.asarray(x, dtype=complex))
        assert abs(inner_product(UNIFORM, one, one) - 1) < 1e-15

    def test_distinct_monomials_orthogonal(self):
        f = lambda z: z
        g = lambda z: z**2
        assert abs(inner_product(UNIFORM, f, g, degree=3)) < 1e-15

    def test_scaled_chebyshev_normalized(self):
        t1 = lambda x: np.sqrt(2.0) * x
        assert abs(inner_product(CHEB, t1, t1, degree=2) - 1) < 1e-13

    def test_conjugate_symmetry(self):
        f = lambda z: z + 0.5j
        g = lambda z: z**2 - 0.25
        a = inner_product(UNIFORM, f, g, degree=3)
        b = inner_product(UNIFORM, g, f, degree=3)
        assert abs(a - np.conj(b)) < 1e-14


class TestFamilies:
    def test_jacobi_matches_chebyshev_special_case(self):
        jac = RealWeighted(interval=(-1.0, 1.0), family="jacobi",
                           parameters=(-0.5, -0.5), resolution=128)
        for k in range(8):
            assert abs(moment(jac, k) - moment(CHEB, k)) < 1e-12

    def test_jacobi_mass_is_one(self):
        jac = RealWeighted(interval=(0.0, 1.0), family="jacobi",
                           parameters=(1.0, 2.0), resolution=64)
        rule = quadrature_rule(jac)
        assert abs(rule.weights.sum() - 1.0) < 1e-12

    def test_polytrig_requires_unit_mass(self):
        with pytest.raises(SpecError):
            CircleWeighted(family="poly-trig", coefficients=[2.0, 0.5])

    def test_polytrig_requires_nonnegative_weight(self):
        with pytest.raises(SpecError):
            CircleWeighted(family="poly-trig", coefficients=[1.0, 0.9])

    def test_atoms_must_be_probability(self):
        with pytest.raises(SpecError):
            RealAtoms(nodes=[0.0, 1.0], weights=[0.5, 0.6])

    def test_verblunsky_inside_disk(self):
        with pytest.raises(SpecError):
            CircleVerblunsky(alpha=[1.0 + 0j])

    def test_degree_cap(self):
        spec = RealAtoms(nodes=[-1.0, 1.0], weights=[0.5, 0.5])
        require_degree(spec, 1)
        with pytest.raises(DegreeCapError):
            require_degree(spec, 2)


class TestJson:
    SPECS = [
        RealAtoms(nodes=[-1.0, 0.1234567890123456], weights=[0.25, 0.75]),
        RealWeighted(interval=(-2.0, 3.0), family="jacobi", parameters=(0.5, -0.25)),
        CircleAtoms(angles=[0.0, 1.0, 2.5], weights=[0.2, 0.3, 0.5]),
        CircleWeighted(family="poly-trig", coefficients=[1.0, -0.25 + 0.125j]),
        CircleVerblunsky(alpha=[0.1 + 0.2j, -0.3 + 0j]),
    ]

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: type(s).__name__)
    def test_round_trip_bit_exact(self, spec):
        text = to_json(spec)
        again = from_json(text)
        assert again == spec
        assert to_json(again) == text

    def test_rejects_unknown_key(self):
        doc = to_json_dict(RealAtoms(nodes=[0.0], weights=[1.0]))
        doc["extra"] = 1
        with pytest.raises(SpecError, match="extra"):
            from_json(json.dumps(doc))

    def test_rejects_unknown_type(self):
        with pytest.raises(SpecError):
            from_json('{"type": "nonsense"}')

    def test_hash_stable_and_sensitive(self):
        a = RealAtoms(nodes=[0.0, 0.5], weights=[0.5, 0.5])
        b = RealAtoms(nodes=[0.0, 0.5000000001], weights=[0.5, 0.5])
        assert spec_hash(a) == spec_hash(a)
        assert spec_hash(a) != spec_hash(b)
