"""Global maximization of continuous objectives over lp unit spheres.

Strategy: multistart projected ascent with finite-difference gradients,
seeded from deterministic sphere samples and, when the sphere has real
dimension <= 3, from a dense parametric grid. Grid-seeded runs report a
certified gap of L * h, where h is the covering radius of the grid and L
a caller-supplied Lipschitz bound; everything else is flagged heuristic.

Projection back to the sphere is radial (x / ||x||_p). For p = inf the
ascent additionally walks faces explicitly: one coordinate is pinned at
modulus one (a free phase over C) and the rest move inside the box,
because radial steps lose the gradient signal into the flat faces.

Estimates carry lower-bound semantics: the reported value is an attained
objective value, never an extrapolation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .poly import HomPoly
from .spaces import (
    SpaceDescriptor,
    SpaceError,
    norm_batch,
    real_embed,
    real_unembed,
    sample_sphere,
)

__all__ = [
    "OptimConfig",
    "SphereMax",
    "NormEstimate",
    "NonFiniteObjective",
    "NoAttainment",
    "GRID_CERTIFIED",
    "HEURISTIC",
    "sphere_grid",
    "maximize_on_sphere",
    "poly_norm",
    "poly_norm_objective",
    "near_maximizer_set",
    "attainment_candidates",
    "ascend",
    "lipschitz_bound",
]

GRID_CERTIFIED = "grid_certified"
HEURISTIC = "heuristic"

_FD_REL = 1e-6          # central differences, relative step
_STEP_FLOOR = 1e-13
# below this (relative to the running value) a finite-difference gradient
# is indistinguishable from rounding noise and ascent stops; the value
# error this leaves behind is quadratically smaller
_GRAD_RTOL = 5e-10


class NonFiniteObjective(RuntimeError):
    """The objective returned NaN/inf; carries the offending point."""

    def __init__(self, point):
        super().__init__("objective returned a non-finite value")
        self.point = np.asarray(point)


class NoAttainment(RuntimeError):
    """The estimated sup falls short of the attainment threshold."""


@dataclass(frozen=True)
class OptimConfig:
    """Budget and determinism knobs for the sphere engine."""

    restarts: int = 8
    max_iters: int = 120
    step_init: float = 0.25
    tol: float = 1e-12
    seed: int = 0
    grid_resolution: int = 4096
    cross_tol: float = 5e-3

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    def to_json(self) -> dict:
        return {
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "step_init": self.step_init,
            "tol": self.tol,
            "seed": self.seed,
            "grid_resolution": self.grid_resolution,
            "cross_tol": self.cross_tol,
        }

    @staticmethod
    def from_json(data: dict) -> "OptimConfig":
        return OptimConfig(**data)


@dataclass(frozen=True)
class SphereMax:
    point: np.ndarray
    value: float
    trace: tuple
    status: str
    gap: float | None


@dataclass(frozen=True)
class NormEstimate:
    """Lower-bound estimate of a polynomial sup norm."""

    value: float
    maximizer: np.ndarray
    status: str
    trace: tuple
    gap: float | None
    lipschitz: float | None

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "maximizer_re": [float(np.real(c)) for c in self.maximizer],
            "maximizer_im": [float(np.imag(c)) for c in self.maximizer],
            "status": self.status,
            "gap": self.gap,
            "lipschitz": self.lipschitz,
            "trace": [[int(i), float(v)] for i, v in self.trace],
        }


def _check_finite(vals: np.ndarray, points: np.ndarray) -> None:
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise NonFiniteObjective(points[int(np.argmax(bad))])


def _odd(n: int) -> int:
    n = max(3, int(n))
    return n if n % 2 == 1 else n + 1


def _radial_project(space: SpaceDescriptor, X: np.ndarray) -> np.ndarray:
    n = norm_batch(space, X)
    n = np.where(n > 0, n, 1.0)
    return X / n[:, None]


def _grid_box_faces(space: SpaceDescriptor, budget: int):
    """Dense sweep of an l_inf sphere, face by face. Returns (points, cover)."""
    d = space.dim
    pts = []
    if not space.is_complex:
        r = _odd(round(budget ** (1.0 / max(1, d - 1))))
        axes = [np.linspace(-1.0, 1.0, r)] * (d - 1)
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d - 1) \
            if d > 1 else np.zeros((1, 0))
        for j in range(d):
            for s in (1.0, -1.0):
                face = np.empty((mesh.shape[0], d))
                face[:, :j] = mesh[:, :j]
                face[:, j] = s
                face[:, j + 1:] = mesh[:, j:]
                pts.append(face)
        step = 2.0 / (r - 1) if r > 1 else 0.0
        cover = 0.5 * step * math.sqrt(max(1, d - 1))
    else:
        n_par = 2 * d - 1
        r = _odd(round(budget ** (1.0 / n_par)))
        rphi = 2 * r
        phis = np.linspace(0.0, 2 * math.pi, rphi, endpoint=False)
        axes = [np.linspace(-1.0, 1.0, r)] * (2 * (d - 1))
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2 * (d - 1)) \
            if d > 1 else np.zeros((1, 0))
        disks = mesh.view(np.complex128) if d > 1 else np.zeros((1, 0), dtype=np.complex128)
        mod = np.abs(disks)
        disks = disks / np.where(mod > 1.0, mod, 1.0)
        for j in range(d):
            for phi in phis:
                face = np.empty((disks.shape[0], d), dtype=np.complex128)
                face[:, :j] = disks[:, :j]
                face[:, j] = np.exp(1j * phi)
                face[:, j + 1:] = disks[:, j:]
                pts.append(face)
        step = 2.0 / (r - 1) if r > 1 else 0.0
        cover = 0.5 * max(2 * math.pi / rphi, step * math.sqrt(max(1, 2 * (d - 1))))
    return np.concatenate(pts, axis=0), cover


def _grid_radial(space: SpaceDescriptor, budget: int):
    """Angular grid on the Euclidean sphere, renormalized into lp."""
    n = space.real_dim
    if n == 1:
        return np.array([[1.0], [-1.0]]), 0.0
    if n == 2:
        res = max(8, int(budget))
        t = np.linspace(0.0, 2 * math.pi, res, endpoint=False)
        U = np.stack([np.cos(t), np.sin(t)], axis=1)
        h_par = 2 * math.pi / res
    elif n == 3:
        r_th = max(6, int(round(math.sqrt(budget / 2.0))))
        r_ph = 2 * r_th
        th = np.linspace(0.0, math.pi, r_th)
        ph = np.linspace(0.0, 2 * math.pi, r_ph, endpoint=False)
        TH, PH = np.meshgrid(th, ph, indexing="ij")
        U = np.stack(
            [np.sin(TH) * np.cos(PH), np.sin(TH) * np.sin(PH), np.cos(TH)], axis=-1
        ).reshape(-1, 3)
        h_par = max(math.pi / (r_th - 1), 2 * math.pi / r_ph)
    else:
        r = max(4, int(round((budget / 4.0) ** (1.0 / 3.0))))
        a1 = np.linspace(0.0, math.pi, r)
        a2 = np.linspace(0.0, math.pi, r)
        a3 = np.linspace(0.0, 2 * math.pi, 2 * r, endpoint=False)
        A1, A2, A3 = np.meshgrid(a1, a2, a3, indexing="ij")
        U = np.stack(
            [
                np.cos(A1),
                np.sin(A1) * np.cos(A2),
                np.sin(A1) * np.sin(A2) * np.cos(A3),
                np.sin(A1) * np.sin(A2) * np.sin(A3),
            ],
            axis=-1,
        ).reshape(-1, 4)
        h_par = max(math.pi / (r - 1), math.pi / r)
    axes = np.concatenate([np.eye(n), -np.eye(n)], axis=0)
    U = np.concatenate([U, axes], axis=0)
    X = real_unembed(space, U).astype(space.dtype)
    X = _radial_project(space, X)
    # renormalization stretches chords by at most max(1/||u||_p) over directions
    stretch = float(np.max(1.0 / norm_batch(space, real_unembed(space, np.eye(n)).astype(space.dtype))))
    stretch = max(stretch, 1.0)
    return X, 0.5 * h_par * 2.0 * stretch


def sphere_grid(space: SpaceDescriptor, budget: int):
    """Deterministic dense grid of the unit sphere: (points, covering radius)."""
    if space.real_dim == 1:
        return np.array([[1.0], [-1.0]]), 0.0
    if math.isinf(space.p):
        return _grid_box_faces(space, budget)
    return _grid_radial(space, budget)


def _fd_steps(u: np.ndarray) -> np.ndarray:
    return _FD_REL * np.maximum(1.0, np.abs(u))


def ascend(space: SpaceDescriptor, f, x0: np.ndarray, cfg: OptimConfig,
           max_iters: int | None = None):
    """Projected-ascent refinement of a single sphere point.

    Returns (point, value). For p = inf the point's dominant coordinate is
    pinned to the face and only the remaining (boxed) coordinates move.
    """
    iters = cfg.max_iters if max_iters is None else max_iters
    if math.isinf(space.p):
        return _ascend_face(space, f, x0, cfg, iters)
    return _ascend_radial(space, f, x0, cfg, iters)


def _eval_points(space, f, X):
    vals = np.asarray(f(X), dtype=np.float64)
    _check_finite(vals, X)
    return vals


def _ascend_radial(space, f, x0, cfg, iters):
    u = real_embed(space, x0)
    n = u.shape[0]

    def project(U):
        X = real_unembed(space, U).astype(space.dtype, copy=False)
        return _radial_project(space, X)

    x = project(u[None, :])[0]
    v = float(_eval_points(space, f, x[None, :])[0])
    if n == 1:
        alt = -x
        va = float(_eval_points(space, f, alt[None, :])[0])
        return (alt, va) if va > v else (x, v)
    step = cfg.step_init
    u = real_embed(space, x)
    for _ in range(iters):
        h = _fd_steps(u)
        U = np.repeat(u[None, :], 2 * n, axis=0)
        for i in range(n):
            U[2 * i, i] += h[i]
            U[2 * i + 1, i] -= h[i]
        vals = _eval_points(space, f, project(U))
        g = (vals[0::2] - vals[1::2]) / (2.0 * h)
        gn = float(np.linalg.norm(g))
        if gn <= _GRAD_RTOL * max(1.0, abs(v)):
            break
        d = g / gn
        trials = step * np.array([2.0, 1.0, 0.5, 0.25])
        cand = project(u[None, :] + trials[:, None] * d[None, :])
        cv = _eval_points(space, f, cand)
        j = int(np.argmax(cv))
        if cv[j] > v:
            x = cand[j]
            v = float(cv[j])
            u = real_embed(space, x)
            step = min(1.0, trials[j] * 2.0)
        else:
            step *= 0.25
            if step < max(_STEP_FLOOR, cfg.tol * 1e-1):
                break
    return x, v


def _ascend_face(space, f, x0, cfg, iters):
    """Ascent on one face of the l_inf sphere (pinned dominant coordinate)."""
    d = space.dim
    x0 = np.asarray(x0, dtype=space.dtype)
    j = int(np.argmax(np.abs(x0)))
    free = [i for i in range(d) if i != j]

    if not space.is_complex:
        s = 1.0 if x0[j] >= 0 else -1.0

        def build(T):
            X = np.empty((T.shape[0], d))
            X[:, j] = s
            if free:
                X[:, free] = np.clip(T, -1.0, 1.0)
            return X

        t0 = x0[free].real.astype(np.float64) if free else np.zeros(0)
        t0 = np.clip(t0, -1.0, 1.0)
    else:
        phi0 = float(np.angle(x0[j])) if abs(x0[j]) > 0 else 0.0

        def build(T):
            X = np.empty((T.shape[0], d), dtype=np.complex128)
            X[:, j] = np.exp(1j * T[:, 0])
            if free:
                W = np.ascontiguousarray(T[:, 1:]).view(np.complex128)
                mod = np.abs(W)
                X[:, free] = W / np.where(mod > 1.0, mod, 1.0)
            return X

        w0 = x0[free]
        mod = np.abs(w0)
        w0 = w0 / np.where(mod > 1.0, mod, 1.0)
        t0 = np.concatenate([[phi0], real_embed(SpaceDescriptor(space.field, 2.0, max(1, len(free))), w0)[: 2 * len(free)]]) \
            if free else np.array([phi0])

    t = np.asarray(t0, dtype=np.float64)
    m = t.shape[0]
    x = build(t[None, :])[0]
    v = float(_eval_points(space, f, x[None, :])[0])
    if m == 0:
        return x, v
    step = cfg.step_init
    for _ in range(iters):
        h = _fd_steps(t)
        T = np.repeat(t[None, :], 2 * m, axis=0)
        for i in range(m):
            T[2 * i, i] += h[i]
            T[2 * i + 1, i] -= h[i]
        vals = _eval_points(space, f, build(T))
        g = (vals[0::2] - vals[1::2]) / (2.0 * h)
        gn = float(np.linalg.norm(g))
        if gn <= _GRAD_RTOL * max(1.0, abs(v)):
            break
        dvec = g / gn
        trials = step * np.array([2.0, 1.0, 0.5, 0.25])
        cand_t = t[None, :] + trials[:, None] * dvec[None, :]
        cand = build(cand_t)
        cv = _eval_points(space, f, cand)
        jbest = int(np.argmax(cv))
        if cv[jbest] > v:
            x = cand[jbest]
            v = float(cv[jbest])
            t = cand_t[jbest]
            if not space.is_complex:
                t = np.clip(t, -1.0, 1.0)
            step = min(1.0, trials[jbest] * 2.0)
        else:
            step *= 0.25
            if step < max(_STEP_FLOOR, cfg.tol * 1e-1):
                break
    return x, v


def _face_seeds(space: SpaceDescriptor, base: list[np.ndarray]) -> list[np.ndarray]:
    """One seed per l_inf face so every face gets explored."""
    if not math.isinf(space.p):
        return []
    out = []
    for j in range(space.dim):
        for s in (1.0, -1.0):
            for b in base[: 1]:
                x = np.array(b, dtype=space.dtype, copy=True)
                x[j] = s
                mod = np.abs(x)
                x = x / np.where(mod > 1.0, mod, 1.0)
                out.append(x)
            if space.is_complex:
                break  # phase is a free parameter; one face per coordinate
    return out


def maximize_on_sphere(space: SpaceDescriptor, f, cfg: OptimConfig,
                       lipschitz: float | None = None) -> SphereMax:
    """Best point found for a batch objective f: (m, dim) -> (m,).

    Deterministic for fixed inputs and seed; restarts are reduced in
    index order. ``status`` is grid-certified only when the sphere's real
    dimension is at most 3, a dense grid ran, and a Lipschitz bound was
    supplied for the gap.
    """
    trace = []
    best_x = None
    best_v = -math.inf
    gap = None
    status = HEURISTIC

    seeds: list[np.ndarray] = []
    if space.sphere_dim <= 3:
        grid, cover = sphere_grid(space, cfg.grid_resolution)
        gvals = _eval_points(space, f, grid)
        order = np.argsort(-gvals, kind="stable")
        top = order[: max(2, min(cfg.restarts, 16))]
        seeds.extend(grid[i] for i in top)
        best_x = grid[int(order[0])]
        best_v = float(gvals[int(order[0])])
        trace.append((0, best_v))
        if lipschitz is not None:
            status = GRID_CERTIFIED
            gap = float(lipschitz) * cover
    samples = sample_sphere(space, cfg.restarts, cfg.seed)
    seeds.extend(samples)
    seeds.extend(_face_seeds(space, samples))

    for i, s in enumerate(seeds):
        x, v = ascend(space, f, s, cfg)
        if v > best_v:
            best_v = v
            best_x = x
        trace.append((i + 1, best_v))
    return SphereMax(point=best_x, value=best_v, trace=tuple(trace), status=status, gap=gap)


def poly_norm_objective(P: HomPoly):
    """Batch objective x -> ||P(x)|| in the codomain norm."""
    cod = P.codomain

    def f(X):
        return norm_batch(cod, P.evaluate_many(X))

    return f


def lipschitz_bound(P: HomPoly) -> float:
    """Crude but safe Lipschitz bound for ||P(.)|| on the unit ball."""
    return P.degree * P.coeff_abs_sum() * P.domain.dim ** P.degree


def poly_norm(P: HomPoly, cfg: OptimConfig) -> NormEstimate:
    """Sup-norm estimate with lower-bound semantics.

    By homogeneity the sup over the ball equals the sup over the sphere.
    """
    L = lipschitz_bound(P)
    sm = maximize_on_sphere(P.domain, poly_norm_objective(P), cfg, lipschitz=L)
    return NormEstimate(
        value=sm.value,
        maximizer=sm.point,
        status=sm.status,
        trace=sm.trace,
        gap=sm.gap,
        lipschitz=L,
    )


def _dedup_keep_best(space: SpaceDescriptor, pts: np.ndarray, vals: np.ndarray,
                     radius: float):
    """Greedy best-first dedup at the given embedding radius."""
    if pts.shape[0] == 0:
        return pts, vals
    emb = np.stack([real_embed(space, p) for p in pts])
    order = np.argsort(-vals, kind="stable")
    tree = cKDTree(emb)
    removed = np.zeros(pts.shape[0], dtype=bool)
    keep = []
    for i in order:
        if removed[i]:
            continue
        keep.append(int(i))
        for jn in tree.query_ball_point(emb[i], radius):
            removed[jn] = True
    keep.sort(key=lambda i: (-vals[i], i))
    idx = np.array(keep, dtype=np.int64)
    return pts[idx], vals[idx]


def attainment_candidates(Q: HomPoly, eta: float, cfg: OptimConfig):
    """Sweep for near-maximizers of ||Q(.)||: (points, values, best value).

    Grid (when the sphere dimension allows), deterministic samples, and
    ascent refinements from the strongest seeds; filtered at 1 - eta and
    deduplicated best-first at radius 10 * eta.
    """
    f = poly_norm_objective(Q)
    space = Q.domain
    pools = []
    vols = []

    seeds: list[np.ndarray] = []
    if space.sphere_dim <= 3:
        grid, _ = sphere_grid(space, cfg.grid_resolution)
        gvals = _eval_points(space, f, grid)
        pools.append(grid)
        vols.append(gvals)
        order = np.argsort(-gvals, kind="stable")
        seeds.extend(grid[i] for i in order[: max(8, cfg.restarts)])
    samples = sample_sphere(space, max(cfg.restarts, 8), cfg.seed)
    spts = np.stack(samples)
    pools.append(spts)
    vols.append(_eval_points(space, f, spts))
    seeds.extend(samples)
    seeds.extend(_face_seeds(space, samples))

    refined = []
    for s in seeds:
        x, _ = ascend(space, f, s, cfg)
        refined.append(x)
    if refined:
        rpts = np.stack(refined)
        pools.append(rpts)
        vols.append(_eval_points(space, f, rpts))

    pts = np.concatenate(pools, axis=0)
    vals = np.concatenate(vols, axis=0)
    best = float(vals.max())
    mask = vals >= 1.0 - eta
    pts, vals = pts[mask], vals[mask]
    pts, vals = _dedup_keep_best(space, pts, vals, 10.0 * eta)
    return pts, vals, best


def near_maximizer_set(Q: HomPoly, eta: float, cfg: OptimConfig) -> list[np.ndarray]:
    """Unit vectors x with ||Q(x)|| >= 1 - eta, deduplicated best-first.

    Raises :class:`NoAttainment` when the estimated sup stays below
    1 - eta (the caller was supposed to normalize Q).
    """
    pts, _, best = attainment_candidates(Q, eta, cfg)
    if best < 1.0 - eta:
        raise NoAttainment(f"no attainment: estimated sup {best} < 1 - eta")
    return [pts[i] for i in range(pts.shape[0])]
