import math

import numpy as np
import pytest

from polyrad.cases import build_l1sq_pair, build_linf_cubic_pair, build_lpsq_pair, scalar_poly
from polyrad.optim import (
    GRID_CERTIFIED,
    NoAttainment,
    NonFiniteObjective,
    OptimConfig,
    maximize_on_sphere,
    near_maximizer_set,
    poly_norm,
    sphere_grid,
)
from polyrad.poly import zero_poly
from polyrad.spaces import SpaceDescriptor, norm, norm_batch

L1 = SpaceDescriptor("real", 1.0, 2)
L2 = SpaceDescriptor("real", 2.0, 2)
LINF = SpaceDescriptor("real", math.inf, 2)


class TestMaximize:
    def test_linear_functional_euclidean(self, cfg_std):
        # Cauchy-Schwarz: sup of <u, x> over the sphere is ||u||
        u = np.array([0.3, -1.7])

        def f(X):
            return np.abs(X @ u)

        sm = maximize_on_sphere(L2, f, cfg_std)
        assert sm.value == pytest.approx(float(np.linalg.norm(u)), abs=1e-8)

    def test_l1_face_objective(self, cfg_std):
        def f(X):
            a = X[:, 0] ** 2 / 2 + 2 * X[:, 0] * X[:, 1]
            b = X[:, 1] ** 2 / 2 + X[:, 0] * X[:, 1]
            return np.abs(a) + np.abs(b)

        sm = maximize_on_sphere(L1, f, cfg_std)
        assert sm.value == pytest.approx(1.0, abs=1e-6)
        assert abs(abs(sm.point[1]) - 0.5) < 1e-4

    def test_sup_face_cubic(self, cfg_std):
        def f(X):
            return np.abs(X[:, 0] ** 2 * X[:, 1] - X[:, 1] ** 3)

        sm = maximize_on_sphere(LINF, f, cfg_std)
        assert sm.value == pytest.approx(1.0, abs=1e-6)
        assert abs(sm.point[1]) == pytest.approx(1.0, abs=1e-6)

    def test_deterministic_bit_for_bit(self, cfg_std):
        _, P = build_l1sq_pair()
        a = poly_norm(P, cfg_std)
        b = poly_norm(P, cfg_std)
        assert a.value == b.value
        assert np.array_equal(a.maximizer, b.maximizer)
        assert a.trace == b.trace

    def test_trace_monotone(self, cfg_std):
        _, P = build_l1sq_pair()
        trace = poly_norm(P, cfg_std).trace
        values = [v for _, v in trace]
        assert values == sorted(values)

    def test_non_finite_objective_carries_point(self, cfg_std):
        def f(X):
            out = np.ones(X.shape[0])
            out[np.abs(X[:, 0]) < 0.999999] = np.nan
            return out

        with pytest.raises(NonFiniteObjective) as err:
            maximize_on_sphere(L2, f, cfg_std)
        assert err.value.point.shape == (2,)

    def test_grid_certification_and_doubling(self, cfg_std):
        _, P = build_l1sq_pair()
        est = poly_norm(P, cfg_std)
        assert est.status == GRID_CERTIFIED
        assert est.gap is not None and est.gap > 0
        cfg2 = OptimConfig(
            restarts=cfg_std.restarts,
            max_iters=cfg_std.max_iters,
            grid_resolution=2 * cfg_std.grid_resolution,
            seed=cfg_std.seed,
        )
        est2 = poly_norm(P, cfg2)
        assert abs(est2.value - est.value) <= est.gap

    def test_heuristic_status_above_grid_dims(self, cfg_fast):
        sp = SpaceDescriptor("real", 2.0, 5)
        P = zero_poly(2, sp, sp)
        assert poly_norm(P, cfg_fast).status == "heuristic"


class TestPolyNorm:
    def test_l1sq_norm_one(self, cfg_std):
        _, P = build_l1sq_pair()
        assert poly_norm(P, cfg_std).value == pytest.approx(1.0, abs=1e-6)

    def test_zero(self, cfg_std):
        assert poly_norm(zero_poly(2, L2, L2), cfg_std).value == 0.0

    @pytest.mark.parametrize("p,k", [(1.5, 2), (2.0, 2), (3.0, 3)])
    def test_swap_norm_one(self, cfg_std, p, k):
        _, P = build_lpsq_pair(p, k)
        assert poly_norm(P, cfg_std).value == pytest.approx(1.0, abs=1e-6)

    def test_value_matches_maximizer(self, cfg_std):
        _, P = build_l1sq_pair()
        est = poly_norm(P, cfg_std)
        at = norm(P.codomain, P.evaluate(est.maximizer))
        assert abs(est.value - at) <= 1e-10


class TestNearMaximizers:
    def test_l1sq_vertices(self, cfg_std):
        Q, _ = build_l1sq_pair()
        pts = near_maximizer_set(Q, 1e-6, cfg_std)
        got = {tuple(np.round(p, 6)) for p in pts}
        assert got == {(1.0, 0.0), (0.0, 1.0), (-1.0, -0.0), (-0.0, -1.0)} or \
            {tuple(np.abs(np.round(p, 6))) for p in pts} == {(1.0, 0.0), (0.0, 1.0)}
        assert len(pts) == 4

    def test_linf_cubic_faces_swept(self, cfg_std):
        Q, _ = build_linf_cubic_pair()
        pts = near_maximizer_set(Q, 1e-6, cfg_std)
        arr = np.stack(pts)
        on_face = np.abs(np.abs(arr[:, 0]) - 1.0) < 1e-9
        ts = np.sort(arr[on_face, 1])
        assert ts.size > 200
        # the face parameter is covered densely, including near 1/sqrt(3)
        assert np.max(np.diff(ts)) < 0.01
        assert np.min(np.abs(ts - 1.0 / math.sqrt(3.0))) < 0.01

    def test_scalar_sphere(self, cfg_scalar):
        Q = scalar_poly(3, "real")
        pts = near_maximizer_set(Q, 1e-6, cfg_scalar)
        assert {float(p[0]) for p in pts} == {1.0, -1.0}

    def test_no_attainment_error(self, cfg_fast):
        Q, _ = build_l1sq_pair()
        with pytest.raises(NoAttainment):
            near_maximizer_set(Q.scale(0.5), 1e-6, cfg_fast)

    def test_all_points_near_unit_q(self, cfg_std):
        Q, _ = build_linf_cubic_pair()
        pts = np.stack(near_maximizer_set(Q, 1e-6, cfg_std))
        vals = norm_batch(Q.codomain, Q.evaluate_many(pts))
        assert np.all(vals >= 1.0 - 1e-6)
        assert np.all(np.abs(norm_batch(Q.domain, pts) - 1.0) <= 1e-12)


class TestGrids:
    @pytest.mark.parametrize("space", [
        SpaceDescriptor("real", 2.0, 2),
        SpaceDescriptor("real", 1.0, 3),
        SpaceDescriptor("complex", 2.0, 1),
        SpaceDescriptor("complex", 3.0, 2),
        SpaceDescriptor("real", math.inf, 2),
        SpaceDescriptor("complex", math.inf, 2),
    ], ids=str)
    def test_grid_points_on_sphere(self, space):
        pts, cover = sphere_grid(space, 512)
        assert pts.shape[0] > 0
        assert cover >= 0.0
        np.testing.assert_allclose(norm_batch(space, pts), 1.0, atol=1e-12)

    def test_dim1_real_grid(self):
        pts, cover = sphere_grid(SpaceDescriptor("real", 2.0, 1), 64)
        assert sorted(pts[:, 0].tolist()) == [-1.0, 1.0]
        assert cover == 0.0
