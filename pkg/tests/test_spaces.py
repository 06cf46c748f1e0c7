import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyrad.spaces import (
    DimensionMismatch,
    SpaceDescriptor,
    SpaceError,
    dual_face_argmax,
    dual_face_argmax_batch,
    dual_face_value_batch,
    norm,
    norm_batch,
    norming_functionals,
    pair,
    real_embed,
    real_unembed,
    sample_sphere,
)

from conftest import SPACE_GRID, random_vector

L1 = SpaceDescriptor("real", 1.0, 2)
L2 = SpaceDescriptor("real", 2.0, 2)
LINF = SpaceDescriptor("real", math.inf, 2)
C2 = SpaceDescriptor("complex", 2.0, 2)


# ------------------------------------------------------------------
# independent oracle: maximize pair(b, y) over a dense grid of the dual
# sphere; used to certify norming functionals before trusting them


def dual_sphere_grid(space, n=2001):
    """Dense grid on the unit sphere of the DUAL of a 2-dim space."""
    q = space.q
    if math.isinf(q):
        # boundary of the square: four edges
        t = np.linspace(-1.0, 1.0, n)
        edges = [np.stack([t, np.full(n, s)], axis=1) for s in (1.0, -1.0)]
        edges += [np.stack([np.full(n, s), t], axis=1) for s in (1.0, -1.0)]
        return np.concatenate(edges)
    ang = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    U = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    dual = SpaceDescriptor(space.field, q, space.dim)
    return U / norm_batch(dual, U)[:, None]


def oracle_norming_max(space, y, n=4001):
    B = dual_sphere_grid(space, n)
    vals = B @ np.asarray(y)
    return float(vals.max()), B[np.argmax(vals)]


class TestNorm:
    def test_l1_sum_of_moduli(self):
        assert norm(L1, [0.5, 0.5]) == 1.0

    def test_linf_max_modulus(self):
        assert norm(LINF, [1.0, 1.0 / math.sqrt(3.0)]) == 1.0

    def test_complex_euclidean(self):
        assert norm(C2, [0.6j, 0.8]) == pytest.approx(1.0, abs=1e-15)

    def test_zero_iff_zero(self):
        assert norm(L2, [0.0, 0.0]) == 0.0
        assert norm(L2, [1e-300, 0.0]) > 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            norm(L2, [1.0, 2.0, 3.0])

    def test_non_finite_rejected(self):
        with pytest.raises(SpaceError):
            norm(L2, [math.nan, 0.0])
        with pytest.raises(SpaceError):
            norm(C2, [complex(1, math.inf), 0.0])


class TestPair:
    def test_coordinate_functional(self):
        assert pair([1.0, 0.0], [0.7, -2.0]) == 0.7

    def test_l1_face_center(self):
        assert pair([1.0, 1.0], [0.5, 0.5]) == 1.0

    def test_quadratic_witness_pairing(self):
        # b = (1/x1^2, t) against y = (x1^2, 0) pairs to one for any t
        rng = np.random.default_rng(0)
        for _ in range(10):
            x1 = math.copysign(1.0, rng.standard_normal())
            t = rng.uniform(-1, 1)
            assert pair([1.0 / x1 ** 2, t], [x1 ** 2, 0.0]) == pytest.approx(1.0, abs=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            pair([1.0], [1.0, 2.0])


class TestNormingFunctionals:
    def test_euclidean_self_dual(self):
        out = norming_functionals(L2, [0.6, 0.8])
        assert len(out) == 1
        np.testing.assert_allclose(out[0], [0.6, 0.8], atol=1e-15)

    def test_l1_sparse_point_matches_oracle(self):
        # oracle first: the dual problem max pair(b, e1) over the sup-norm
        # sphere attains 1, on the whole edge b1 = 1; the extreme points
        # of that face are (1, 1) and (1, -1)
        best, _ = oracle_norming_max(L1, [1.0, 0.0])
        assert best == pytest.approx(1.0, abs=1e-12)
        out = norming_functionals(L1, [1.0, 0.0])
        got = {tuple(b) for b in out}
        assert got == {(1.0, 1.0), (1.0, -1.0)}

    def test_linf_argmax_coordinate(self):
        out = norming_functionals(LINF, [1.0, 1.0 / math.sqrt(3.0)])
        assert len(out) == 1
        np.testing.assert_allclose(out[0], [1.0, 0.0], atol=1e-15)

    def test_zero_vector_rejected(self):
        with pytest.raises(SpaceError):
            norming_functionals(L2, [0.0, 0.0])

    def test_cap_truncates_and_hard_limit(self):
        sp = SpaceDescriptor("real", 1.0, 3)
        full = norming_functionals(sp, [1.0, 0.0, 0.0])
        assert len(full) == 4
        assert len(norming_functionals(sp, [1.0, 0.0, 0.0], cap=2)) == 2
        with pytest.raises(SpaceError):
            norming_functionals(sp, [1.0, 0.0, 0.0], cap=2 ** 21)

    @pytest.mark.parametrize("space", SPACE_GRID, ids=str)
    def test_norming_identities(self, space):
        rng = np.random.default_rng(11)
        for _ in range(25):
            y = random_vector(space, rng)
            ny = norm(space, y)
            if ny < 1e-9:
                continue
            dual = space.dual()
            for b in norming_functionals(space, y, cap=16):
                assert abs(pair(b, y) - ny) <= 1e-12 * max(1.0, ny)
                assert abs(norm(dual, b) - 1.0) <= 1e-12

    @pytest.mark.parametrize("space", SPACE_GRID, ids=str)
    def test_face_argmax_dominates_every_functional(self, space):
        rng = np.random.default_rng(13)
        for _ in range(15):
            y = random_vector(space, rng)
            if norm(space, y) < 1e-9:
                continue
            v = random_vector(space, rng)
            val, b = dual_face_argmax(space, y, v)
            assert abs(abs(pair(b, v)) - val) <= 1e-12 * max(1.0, val)
            enum = max(abs(pair(bb, v)) for bb in norming_functionals(space, y, cap=16))
            assert val >= enum - 1e-10

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(5)
        for space in SPACE_GRID:
            Y = np.stack([random_vector(space, rng) for _ in range(8)])
            V = np.stack([random_vector(space, rng) for _ in range(8)])
            Y[0, 0] = 0.0
            vals, B = dual_face_argmax_batch(space, Y, V)
            vals2 = dual_face_value_batch(space, Y, V)
            for i in range(8):
                v1, b1 = dual_face_argmax(space, Y[i], V[i])
                assert vals[i] == pytest.approx(v1, abs=1e-12)
                assert vals2[i] == pytest.approx(v1, abs=1e-12)
                np.testing.assert_allclose(B[i], b1, atol=1e-12)


class TestSampler:
    def test_single_unit_vector(self):
        (v,) = sample_sphere(L2, 1, 42)
        assert norm(L2, v) == pytest.approx(1.0, abs=1e-12)

    def test_linf_vertex_present(self):
        pts = sample_sphere(LINF, 32, 7)
        assert any(np.all(np.abs(p) > 1.0 - 1e-12) for p in pts)

    def test_determinism(self):
        a = sample_sphere(C2, 40, 3)
        b = sample_sphere(C2, 40, 3)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))

    @pytest.mark.parametrize("space", SPACE_GRID, ids=str)
    def test_all_unit(self, space):
        for v in sample_sphere(space, 24, 0):
            assert abs(norm(space, v) - 1.0) <= 1e-12

    def test_count_validation(self):
        with pytest.raises(SpaceError):
            sample_sphere(L2, 0, 0)


class TestDescriptor:
    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, math.inf])
    def test_dual_round_trip(self, p):
        sp = SpaceDescriptor("real", p, 2)
        assert sp.dual().dual() == sp

    def test_invalid(self):
        with pytest.raises(SpaceError):
            SpaceDescriptor("real", 0.5, 2)
        with pytest.raises(SpaceError):
            SpaceDescriptor("real", 2.0, 0)
        with pytest.raises(SpaceError):
            SpaceDescriptor("quaternion", 2.0, 2)

    def test_json_round_trip(self):
        for sp in SPACE_GRID:
            assert SpaceDescriptor.from_json(sp.to_json()) == sp

    def test_embed_round_trip(self):
        rng = np.random.default_rng(2)
        for sp in SPACE_GRID:
            v = random_vector(sp, rng)
            u = real_embed(sp, v)
            np.testing.assert_array_equal(real_unembed(sp, u[None, :])[0], v)


@settings(max_examples=200, deadline=None)
@given(
    data=st.lists(st.floats(-10, 10), min_size=4, max_size=4),
    p=st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]),
)
def test_hoelder_inequality(data, p):
    space = SpaceDescriptor("real", p, 2)
    b = np.array(data[:2])
    y = np.array(data[2:])
    lhs = abs(pair(b, y))
    rhs = norm(space.dual(), b) * norm(space, y)
    assert lhs <= rhs + 1e-12 * max(1.0, rhs)
