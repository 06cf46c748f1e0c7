import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyrad.cases import build_l1sq_pair, build_linf_cubic_pair, build_lpsq_pair
from polyrad.optim import OptimConfig, poly_norm
from polyrad.poly import (
    HomPoly,
    LinOp,
    PolyError,
    SumRecipe,
    adjoint_apply,
    compose_linear,
    direct_sum,
    dump_poly,
    embed_block,
    hom_poly,
    load_poly,
    monomial_exponents,
    poly_from_json,
    poly_to_json,
    zero_poly,
)
from polyrad.spaces import DimensionMismatch, SpaceDescriptor, SpaceError, norm

L1 = SpaceDescriptor("real", 1.0, 2)
L2 = SpaceDescriptor("real", 2.0, 2)

# dyadic rationals are exact in binary floating point, so linearity
# identities below can be asserted with == rather than approx
dyadic = st.integers(-64, 64).map(lambda n: n / 16.0)


def poly_terms_equal(A: HomPoly, B: HomPoly) -> bool:
    return A.terms == B.terms


class TestEvaluate:
    def test_half_coefficient_example(self):
        _, P = build_l1sq_pair()
        out = P.evaluate([0.5, 0.5])
        np.testing.assert_allclose(out, [5.0 / 8.0, -3.0 / 8.0], atol=0)
        assert norm(L1, out) == 1.0

    def test_zero_at_origin(self):
        _, P = build_l1sq_pair()
        np.testing.assert_array_equal(P.evaluate([0.0, 0.0]), [0.0, 0.0])

    def test_coordinate_swap_at_vertex(self):
        for k in (2, 3, 5):
            _, P = build_lpsq_pair(2.0, k)
            np.testing.assert_array_equal(P.evaluate([1.0, 0.0]), [0.0, 1.0])

    def test_dimension_mismatch(self):
        _, P = build_l1sq_pair()
        with pytest.raises(DimensionMismatch):
            P.evaluate([1.0, 2.0, 3.0])

    @settings(max_examples=150, deadline=None)
    @given(
        t=st.floats(-3, 3),
        x1=st.floats(-2, 2),
        x2=st.floats(-2, 2),
    )
    def test_homogeneity(self, t, x1, x2):
        _, P = build_l1sq_pair()
        lhs = P.evaluate([t * x1, t * x2])
        rhs = t ** P.degree * P.evaluate([x1, x2])
        scale = max(1.0, float(np.max(np.abs(rhs))))
        np.testing.assert_allclose(lhs, rhs, atol=1e-10 * scale)

    def test_complex_homogeneity(self):
        sp = SpaceDescriptor("complex", 2.0, 2)
        P = hom_poly(3, sp, sp, [(0, (2, 1), 1 + 2j), (1, (0, 3), -1j)])
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.standard_normal(4).view(np.complex128)
            t = complex(*rng.standard_normal(2))
            lhs = P.evaluate(t * x)
            rhs = t ** 3 * P.evaluate(x)
            np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-12)


class TestConstruction:
    def test_duplicate_keys_rejected_by_strict_builder(self):
        with pytest.raises(PolyError):
            hom_poly(2, L1, L1, [(0, (2, 0), 1.0), (0, (2, 0), 2.0)])

    def test_constructor_merges_duplicates(self):
        P = HomPoly(2, L1, L1, ((0, (2, 0), 1.0), (0, (2, 0), 2.0)))
        assert P.terms == ((0, (2, 0), 3.0),)

    def test_degree_mismatch_rejected(self):
        with pytest.raises(PolyError):
            hom_poly(2, L1, L1, [(0, (1, 0), 1.0)])

    def test_out_of_range_rejected(self):
        with pytest.raises(PolyError):
            hom_poly(2, L1, L1, [(2, (2, 0), 1.0)])

    def test_monomial_exponents(self):
        assert monomial_exponents(2, 2) == [(0, 2), (1, 1), (2, 0)]
        assert len(monomial_exponents(3, 4)) == math.comb(4 + 2, 2)


class TestAdjoint:
    def test_coordinate_extraction(self):
        _, P = build_l1sq_pair()
        q = adjoint_apply(P, [1.0, 0.0])
        assert q.codomain.dim == 1
        assert q.terms == ((0, (1, 1), 2.0), (0, (2, 0), 0.5))

    def test_zero_functional(self):
        _, P = build_l1sq_pair()
        assert adjoint_apply(P, [0.0, 0.0]).is_zero()

    def test_pointwise_identity(self):
        Q, P = build_l1sq_pair()
        rng = np.random.default_rng(1)
        for _ in range(10):
            b = rng.standard_normal(2)
            q = adjoint_apply(P, b)
            x = rng.standard_normal(2)
            assert q.evaluate(x)[0] == pytest.approx(float(b @ P.evaluate(x)), rel=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(a=dyadic, b1=dyadic, b2=dyadic, c1=dyadic, c2=dyadic)
    def test_linearity_exact_on_dyadics(self, a, b1, b2, c1, c2):
        _, P = build_l1sq_pair()
        y = np.array([b1, b2])
        z = np.array([c1, c2])
        lhs = adjoint_apply(P, a * y + z)
        rhs = adjoint_apply(P, y).scale(a) + adjoint_apply(P, z)
        assert poly_terms_equal(lhs, rhs)

    @settings(max_examples=100, deadline=None)
    @given(alpha=dyadic, b1=dyadic, b2=dyadic)
    def test_shift_commutes_with_adjoint_exactly(self, alpha, b1, b2):
        Q, P = build_l1sq_pair()
        y = np.array([b1, b2])
        lhs = adjoint_apply(Q + P.scale(alpha), y)
        rhs = adjoint_apply(Q, y) + adjoint_apply(P, y).scale(alpha)
        assert poly_terms_equal(lhs, rhs)

    def test_adjoint_norm_attains_poly_norm(self, cfg_std):
        # both sides computed by the engine: sup over unit functionals of
        # ||y* o P|| should reach ||P|| (coarse dual grid plus refinement)
        rng = np.random.default_rng(7)
        terms = [(o, a, rng.standard_normal())
                 for o in range(2) for a in monomial_exponents(2, 2)]
        P = HomPoly(2, L2, L2, tuple(terms))
        nP = poly_norm(P, cfg_std).value
        best = 0.0
        angles = np.linspace(0.0, 2 * math.pi, 33, endpoint=False)
        for _ in range(3):
            vals = []
            for t in angles:
                b = np.array([math.cos(t), math.sin(t)])
                v = poly_norm(adjoint_apply(P, b), cfg_std).value
                vals.append(v)
                assert v <= nP + 1e-9
            j = int(np.argmax(vals))
            best = max(best, vals[j])
            width = angles[1] - angles[0] if len(angles) > 1 else 0.1
            angles = np.linspace(angles[j] - width, angles[j] + width, 9)
        assert best >= nP - 2e-2


class TestComposeLinear:
    def test_identity(self):
        _, P = build_l1sq_pair()
        T = LinOp(np.eye(2), L1)
        assert poly_terms_equal(compose_linear(T, P), P)

    def test_zero_operator(self):
        _, P = build_l1sq_pair()
        T = LinOp(np.zeros((2, 2)), L1)
        assert compose_linear(T, P).is_zero()

    def test_quarter_rotation_on_squares(self):
        Q = hom_poly(2, L2, L2, [(0, (2, 0), 1.0), (1, (0, 2), 1.0)])
        rot = LinOp(np.array([[0.0, -1.0], [1.0, 0.0]]), L2)
        out = compose_linear(rot, Q)
        assert out.terms == ((0, (0, 2), -1.0), (1, (2, 0), 1.0))

    def test_space_mismatch(self):
        _, P = build_l1sq_pair()
        T = LinOp(np.eye(2), L2)
        with pytest.raises(PolyError):
            compose_linear(T, P)


class TestDirectSum:
    def test_two_squares_l1(self):
        r1 = SpaceDescriptor("real", 2.0, 1)
        Q1 = hom_poly(2, r1, r1, [(0, (2,), 1.0)])
        Q = direct_sum(SumRecipe("ell_1", (Q1, Q1)))
        assert Q.domain == SpaceDescriptor("real", 1.0, 2)
        assert Q.terms == ((0, (2, 0), 1.0), (1, (0, 2), 1.0))

    def test_two_cubes_linf(self):
        r1 = SpaceDescriptor("real", 2.0, 1)
        Q1 = hom_poly(3, r1, r1, [(0, (3,), 1.0)])
        Q = direct_sum(SumRecipe("ell_inf", (Q1, Q1)))
        assert Q.domain.p == math.inf
        np.testing.assert_array_equal(Q.evaluate([0.5, -1.0]), [0.125, -1.0])

    def test_blockwise_evaluation(self):
        li = SpaceDescriptor("real", math.inf, 2)
        rng = np.random.default_rng(3)
        A = HomPoly(2, li, li, tuple(
            (o, a, rng.standard_normal()) for o in range(2) for a in monomial_exponents(2, 2)))
        r1 = SpaceDescriptor("real", 2.0, 1)
        B = hom_poly(2, r1, r1, [(0, (2,), -0.5)])
        Q = direct_sum(SumRecipe("ell_inf", (A, B)))
        x = np.array([0.3, -0.7, 0.9])
        np.testing.assert_allclose(
            Q.evaluate(x), np.concatenate([A.evaluate(x[:2]), B.evaluate(x[2:])]), atol=0)

    def test_mixed_degree_rejected(self):
        r1 = SpaceDescriptor("real", 2.0, 1)
        Q1 = hom_poly(2, r1, r1, [(0, (2,), 1.0)])
        Q2 = hom_poly(3, r1, r1, [(0, (3,), 1.0)])
        with pytest.raises(PolyError):
            SumRecipe("ell_inf", (Q1, Q2))

    def test_zero_dim_block_rejected(self):
        with pytest.raises(SpaceError):
            SpaceDescriptor("real", 2.0, 0)

    def test_single_summand_rejected(self):
        r1 = SpaceDescriptor("real", 2.0, 1)
        Q1 = hom_poly(2, r1, r1, [(0, (2,), 1.0)])
        with pytest.raises(PolyError):
            SumRecipe("ell_inf", (Q1,))

    def test_incompatible_block_norms_rejected(self):
        Q1, _ = build_l1sq_pair()
        with pytest.raises(PolyError):
            direct_sum(SumRecipe("ell_inf", (Q1, Q1)))

    def test_lp_sum_kind(self):
        r1 = SpaceDescriptor("real", 2.0, 1)
        Q1 = hom_poly(2, r1, r1, [(0, (2,), 1.0)])
        Q = direct_sum(SumRecipe("ell_p", (Q1, Q1), p=1.5))
        assert Q.domain.p == 1.5

    def test_sum_of_unit_blocks_is_unit(self, cfg_std):
        Q, _ = build_linf_cubic_pair()
        assert poly_norm(Q, cfg_std).value == pytest.approx(1.0, abs=1e-9)

    def test_embed_block(self):
        Qc, Pc = build_linf_cubic_pair()
        big_dom = SpaceDescriptor("real", math.inf, 3)
        E = embed_block(Pc, big_dom, big_dom)
        x = np.array([0.4, -0.9, 0.5])
        np.testing.assert_allclose(E.evaluate(x)[:2], Pc.evaluate(x[:2]), atol=0)
        assert E.evaluate(x)[2] == 0.0


class TestJson:
    def test_round_trip_canonical(self, tmp_path):
        _, P = build_l1sq_pair()
        path = tmp_path / "p.json"
        dump_poly(P, path)
        back = load_poly(path)
        assert poly_terms_equal(P, back)
        data = poly_to_json(P)
        keys = [(t["out"], tuple(t["alpha"])) for t in data["terms"]]
        assert keys == sorted(keys)

    def test_complex_round_trip(self):
        sp = SpaceDescriptor("complex", math.inf, 2)
        P = hom_poly(2, sp, sp, [(0, (1, 1), 1 - 2j), (1, (2, 0), 3j)])
        back = poly_from_json(poly_to_json(P))
        assert poly_terms_equal(P, back)

    def test_duplicate_terms_rejected(self):
        data = poly_to_json(build_l1sq_pair()[1])
        data["terms"].append(dict(data["terms"][0]))
        with pytest.raises(PolyError):
            poly_from_json(data)

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(PolyError):
            load_poly(path)

    def test_field_mismatch_rejected(self):
        data = poly_to_json(build_l1sq_pair()[1])
        data["field"] = "complex"
        with pytest.raises(PolyError):
            poly_from_json(data)


def test_zero_poly_evaluates_to_zero():
    Z = zero_poly(3, L2, L2)
    assert Z.is_zero()
    np.testing.assert_array_equal(Z.evaluate([0.3, 0.4]), [0.0, 0.0])
