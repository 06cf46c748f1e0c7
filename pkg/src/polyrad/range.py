"""Numerical range and radius of P with respect to a norm-one Q.

Three estimators, kept deliberately independent so they can cross-check
each other:

* attainment: enumerate near-maximizers x of ||Q(.)||, pull them onto the
  attainment set, and take the best norming-face pairing |y*(P(x))|;
* delta ladder: for each delta, maximize |y*(P(x))| over unit pairs with
  Re y*(Q(x)) > 1 - delta (candidates plus joint projected ascent with
  rejection of infeasible steps); rungs are continued from wide to narrow
  slices so witnesses track the attainment set;
* limit formula: difference quotients of ||Q + alpha*theta*P|| in alpha,
  maximized over unit scalars theta and Richardson-extrapolated to 0+.

All values carry lower-bound semantics (they are attained pairings).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .optim import (
    OptimConfig,
    ascend,
    attainment_candidates,
    poly_norm,
    poly_norm_objective,
    NoAttainment,
)
from .poly import HomPoly, PolyError
from .spaces import (
    SpaceDescriptor,
    dual_face_argmax,
    dual_face_argmax_batch,
    dual_face_value_batch,
    norm,
    norm_batch,
    norming_functionals,
    real_embed,
    real_unembed,
    sample_sphere,
)

__all__ = [
    "DEFAULT_LADDER",
    "DEFAULT_ETA",
    "ATTAIN_TOL",
    "EmptySlice",
    "InconsistentRadius",
    "WitnessPair",
    "RadiusEstimate",
    "RangeCloud",
    "v_delta",
    "delta_ladder_estimate",
    "numerical_radius",
    "radius_via_limit",
    "range_cloud",
    "convex_hull_2d",
]

DEFAULT_LADDER = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
DEFAULT_ETA = 1e-6
# residual threshold below which a pair counts as sitting on the
# attainment set; loose enough for float dust, tight enough that the
# slice relaxation cannot leak into tight tolerances
ATTAIN_TOL = 1e-10


class EmptySlice(RuntimeError):
    """No unit pair satisfies Re y*(Q(x)) > 1 - delta."""


class InconsistentRadius(RuntimeError):
    """Attainment and delta-ladder estimates disagree far beyond tolerance."""


@dataclass(frozen=True)
class WitnessPair:
    """A unit pair (x, y*) with its slice residual and pairing value."""

    x: np.ndarray
    y_star: np.ndarray
    residual: float
    value: complex

    def to_json(self) -> dict:
        return {
            "x_re": [float(np.real(c)) for c in self.x],
            "x_im": [float(np.imag(c)) for c in self.x],
            "y_star_re": [float(np.real(c)) for c in self.y_star],
            "y_star_im": [float(np.imag(c)) for c in self.y_star],
            "residual": self.residual,
            "value_re": float(np.real(self.value)),
            "value_im": float(np.imag(self.value)),
        }


@dataclass(frozen=True)
class RadiusEstimate:
    value: float
    method: str
    witness: WitnessPair | None
    ladder: tuple
    flags: tuple = ()
    theta_gap: float = 0.0

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "witness": self.witness.to_json() if self.witness else None,
            "ladder": [[float(a), float(v)] for a, v in self.ladder],
            "flags": list(self.flags),
            "theta_gap": self.theta_gap,
        }


@dataclass(frozen=True)
class RangeCloud:
    """Sampled pairing values inside a delta-slice, with their hull."""

    points: np.ndarray
    delta: float
    hull: np.ndarray
    radius: float

    def to_json(self) -> dict:
        return {
            "points": [[float(np.real(z)), float(np.imag(z))] for z in self.points],
            "hull": [[float(np.real(z)), float(np.imag(z))] for z in self.hull],
            "delta": self.delta,
            "radius": self.radius,
        }

    def to_csv(self) -> str:
        lines = ["re,im"]
        for z in self.points:
            lines.append(f"{float(np.real(z))!r},{float(np.imag(z))!r}")
        return "\n".join(lines) + "\n"


def _check_compat(P: HomPoly, Q: HomPoly) -> None:
    if (P.degree, P.domain, P.codomain) != (Q.degree, Q.domain, Q.codomain):
        raise PolyError("P and Q must share degree, domain, and codomain")


def _pair_data(P: HomPoly, Q: HomPoly, x: np.ndarray, b: np.ndarray):
    y = Q.evaluate(x)
    v = P.evaluate(x)
    residual = 1.0 - float(np.real(np.sum(b * y)))
    value = np.sum(b * v)
    return residual, (complex(value) if Q.domain.is_complex else float(np.real(value)))


def _make_witness(P, Q, x, b) -> WitnessPair:
    residual, value = _pair_data(P, Q, x, b)
    return WitnessPair(x=np.array(x), y_star=np.array(b), residual=residual, value=value)


def _dual_normalize(dual: SpaceDescriptor, B: np.ndarray) -> np.ndarray:
    n = norm_batch(dual, B)
    return B / np.where(n > 0, n, 1.0)[:, None]


def _dual_face_argmax_rows(space: SpaceDescriptor, Y: np.ndarray, V: np.ndarray) -> np.ndarray:
    return dual_face_argmax_batch(space, Y, V)[1]


@dataclass(frozen=True)
class _SlicePool:
    """Precomputed candidate pairs shared by every ladder rung.

    ``re`` holds Re y*(Q(x)) per pair, so a rung only masks by its own
    delta instead of re-deriving candidates.
    """

    X: np.ndarray
    B: np.ndarray
    re: np.ndarray
    vals: np.ndarray
    cvals: np.ndarray


def _build_slice_pool(P: HomPoly, Q: HomPoly, cfg: OptimConfig,
                      seed: int | None = None, extra_points=()) -> _SlicePool:
    """Candidate pairs from sphere samples (plus caller-provided points).

    For each x the pool holds the best norming functional of Q(x) against
    P(x) and tilted copies toward the functional norming P(x): tilting
    trades slice residual for pairing value and seeds the joint ascent.
    """
    dom, cod = Q.domain, Q.codomain
    dual = cod.dual()
    xs = list(sample_sphere(dom, max(16, 4 * cfg.restarts), cfg.seed if seed is None else seed))
    xs.extend(np.asarray(p, dtype=dom.dtype) for p in extra_points)
    X = np.stack(xs)
    Y = Q.evaluate_many(X)
    V = P.evaluate_many(X)
    ny = norm_batch(cod, Y)
    keep = ny > 0
    X, Y, V, ny = X[keep], Y[keep], V[keep], ny[keep]
    if X.shape[0] == 0:
        return _SlicePool(X, np.empty_like(Y), np.empty(0), np.empty(0), np.empty(0))
    B_face = _dual_face_argmax_rows(cod, Y, V)
    pools_x = [X]
    pools_b = [B_face]
    nv = norm_batch(cod, V)
    tiltable = nv > 1e-14
    if np.any(tiltable):
        Xt, Yt, Vt = X[tiltable], Y[tiltable], V[tiltable]
        B_val = _dual_face_argmax_rows(cod, Vt, Vt)
        for t in (0.25, 0.5, 1.0):
            B_t = _dual_normalize(dual, (1 - t) * B_face[tiltable] + t * B_val)
            pools_x.append(Xt)
            pools_b.append(B_t)
    Xp = np.concatenate(pools_x, axis=0)
    Bp = np.concatenate(pools_b, axis=0)
    Yp = Q.evaluate_many(Xp)
    Vp = P.evaluate_many(Xp)
    re = np.real(np.sum(Bp * Yp, axis=1))
    cvals = np.sum(Bp * Vp, axis=1)
    return _SlicePool(Xp, Bp, re, np.abs(cvals), cvals)


def _joint_ascent(P: HomPoly, Q: HomPoly, delta: float, x0, b0,
                  cfg: OptimConfig, iters: int):
    """Maximize |y*(P(x))| over feasible unit pairs by projected ascent.

    Steps that leave the slice Re y*(Q(x)) > 1 - delta score -inf and are
    rejected by the line search.
    """
    dom, cod = Q.domain, Q.codomain
    dual = cod.dual()
    nx = dom.real_dim

    def split(U):
        X = real_unembed(dom, np.ascontiguousarray(U[:, :nx]))
        B = real_unembed(dual, np.ascontiguousarray(U[:, nx:]))
        Xn = norm_batch(dom, X)
        Bn = norm_batch(dual, B)
        X = X / np.where(Xn > 0, Xn, 1.0)[:, None]
        B = B / np.where(Bn > 0, Bn, 1.0)[:, None]
        return X, B

    def score(U):
        X, B = split(U)
        Y = Q.evaluate_many(X)
        V = P.evaluate_many(X)
        feas = np.real(np.sum(B * Y, axis=1)) > 1.0 - delta
        vals = np.abs(np.sum(B * V, axis=1))
        return np.where(feas, vals, -1.0), X, B

    u = np.concatenate([real_embed(dom, np.asarray(x0, dtype=dom.dtype)),
                        real_embed(dual, np.asarray(b0, dtype=dual.dtype))])
    m = u.shape[0]
    vals, X, B = score(u[None, :])
    best_v = float(vals[0])
    best = (X[0], B[0])
    if best_v < 0:
        return None
    step = cfg.step_init
    fd = 1e-6
    for _ in range(iters):
        h = fd * np.maximum(1.0, np.abs(u))
        U = np.repeat(u[None, :], 2 * m, axis=0)
        for i in range(m):
            U[2 * i, i] += h[i]
            U[2 * i + 1, i] -= h[i]
        vals, _, _ = score(U)
        g = (vals[0::2] - vals[1::2]) / (2.0 * h)
        gn = float(np.linalg.norm(g))
        if gn <= 5e-10 * max(1.0, abs(best_v)):
            break
        d = g / gn
        trials = step * np.array([2.0, 1.0, 0.5, 0.25])
        cand = u[None, :] + trials[:, None] * d[None, :]
        cvals, CX, CB = score(cand)
        j = int(np.argmax(cvals))
        if cvals[j] > best_v:
            best_v = float(cvals[j])
            best = (CX[j], CB[j])
            u = np.concatenate([real_embed(dom, CX[j]), real_embed(dual, CB[j])])
            step = min(1.0, trials[j] * 2.0)
        else:
            step *= 0.25
            if step < 1e-12:
                break
    return best[0], best[1], best_v


def _repair_pair(P, Q, delta, x, b, cfg):
    """Drive an infeasible pair back into the slice by maximizing Re y*(Q(x))."""
    dom, cod = Q.domain, Q.codomain
    dual = cod.dual()
    nx = dom.real_dim

    def feas_score(U):
        X = real_unembed(dom, np.ascontiguousarray(U[:, :nx]))
        B = real_unembed(dual, np.ascontiguousarray(U[:, nx:]))
        Xn = norm_batch(dom, X)
        Bn = norm_batch(dual, B)
        X = X / np.where(Xn > 0, Xn, 1.0)[:, None]
        B = B / np.where(Bn > 0, Bn, 1.0)[:, None]
        return np.real(np.sum(B * Q.evaluate_many(X), axis=1)), X, B

    u = np.concatenate([real_embed(dom, np.asarray(x, dtype=dom.dtype)),
                        real_embed(dual, np.asarray(b, dtype=dual.dtype))])
    m = u.shape[0]
    val, X, B = feas_score(u[None, :])
    cur = float(val[0])
    best = (X[0], B[0])
    target = 1.0 - 0.5 * delta
    step = cfg.step_init
    for _ in range(40):
        if cur > target:
            break
        h = 1e-6 * np.maximum(1.0, np.abs(u))
        U = np.repeat(u[None, :], 2 * m, axis=0)
        for i in range(m):
            U[2 * i, i] += h[i]
            U[2 * i + 1, i] -= h[i]
        vals, _, _ = feas_score(U)
        g = (vals[0::2] - vals[1::2]) / (2.0 * h)
        gn = float(np.linalg.norm(g))
        if gn <= 5e-10 * max(1.0, abs(cur)):
            break
        d = g / gn
        trials = step * np.array([2.0, 1.0, 0.5])
        cand = u[None, :] + trials[:, None] * d[None, :]
        cvals, CX, CB = feas_score(cand)
        j = int(np.argmax(cvals))
        if cvals[j] > cur:
            cur = float(cvals[j])
            best = (CX[j], CB[j])
            u = np.concatenate([real_embed(dom, CX[j]), real_embed(dual, CB[j])])
            step = min(1.0, trials[j] * 2.0)
        else:
            step *= 0.5
            if step < 1e-10:
                break
    if cur > 1.0 - delta:
        return best
    return None


def v_delta(P: HomPoly, Q: HomPoly, delta: float, cfg: OptimConfig,
            seed_pairs=(), pool: _SlicePool | None = None) -> RadiusEstimate:
    """Lower bound on sup{|y*(P(x))| : Re y*(Q(x)) > 1 - delta}.

    Raises :class:`EmptySlice` when no feasible pair can be produced,
    which signals ||Q|| < 1 - delta.
    """
    _check_compat(P, Q)
    if not delta > 0:
        raise PolyError("delta must be positive")
    cod = Q.codomain
    field_cast = complex if Q.domain.is_complex else float
    scored: list = []  # (absval, x, b, residual, value)
    if seed_pairs:
        Xs = np.stack([np.asarray(x, dtype=Q.domain.dtype) for x, _ in seed_pairs])
        Bs = np.stack([np.asarray(b, dtype=cod.dtype) for _, b in seed_pairs])
        res = 1.0 - np.real(np.sum(Bs * Q.evaluate_many(Xs), axis=1))
        cv = np.sum(Bs * P.evaluate_many(Xs), axis=1)
        repaired_once = False
        for i in range(Xs.shape[0]):
            if res[i] < delta:
                scored.append((abs(cv[i]), Xs[i], Bs[i], float(res[i]), field_cast(cv[i])))
            elif not repaired_once:
                # repairing every stale seed is wasted work; the first
                # infeasible one is the previous rung's witness, which is
                # the continuation path worth preserving
                repaired_once = True
                repaired = _repair_pair(P, Q, delta, Xs[i], Bs[i], cfg)
                if repaired is not None:
                    residual, value = _pair_data(P, Q, *repaired)
                    scored.append((abs(value), repaired[0], repaired[1], residual, value))
    if pool is None:
        pool = _build_slice_pool(P, Q, cfg)
    feas = np.flatnonzero(pool.re > 1.0 - delta)
    order = feas[np.argsort(-pool.vals[feas], kind="stable")][:8]
    scored.extend(
        (float(pool.vals[i]), pool.X[i], pool.B[i],
         1.0 - float(pool.re[i]), field_cast(pool.cvals[i]))
        for i in order
    )
    if not scored:
        # sharply peaked Q: plain samples miss the slice even though
        # ||Q|| = 1; sweep for near-maximizers before giving up
        pts, vals, best = attainment_candidates(Q, delta, cfg)
        if best <= 1.0 - delta:
            raise EmptySlice("empty δ-slice")
        for i in np.flatnonzero(vals > 1.0 - delta):
            x = pts[i]
            _, b = dual_face_argmax(cod, Q.evaluate(x), P.evaluate(x))
            residual, value = _pair_data(P, Q, x, b)
            scored.append((abs(value), x, b, residual, value))
    scored.sort(key=lambda t: -t[0])
    best = scored[0]

    # below four restarts the candidate pool is trusted as-is
    n_starts = cfg.restarts // 4
    iters = max(16, cfg.max_iters // 2)
    improved = None
    for _, x, b, _, _ in scored[:n_starts]:
        res = _joint_ascent(P, Q, delta, x, b, cfg, iters)
        if res is not None and res[2] > best[0] and (improved is None or res[2] > improved[2]):
            improved = res
    if improved is not None:
        witness = _make_witness(P, Q, improved[0], improved[1])
    else:
        witness = WitnessPair(x=np.array(best[1]), y_star=np.array(best[2]),
                              residual=best[3], value=best[4])
    return RadiusEstimate(
        value=abs(witness.value),
        method="delta_ladder",
        witness=witness,
        ladder=((delta, abs(witness.value)),),
    )


def _pull_to_attainment(Q: HomPoly, x: np.ndarray, cfg: OptimConfig):
    """Refine x toward the attainment set of ||Q(.)||; returns (x', residual)."""
    f = poly_norm_objective(Q)
    xp, val = ascend(Q.domain, f, x, cfg)
    return xp, 1.0 - val


_POLISH_SCALES = tuple(10.0 ** -e for e in range(2, 11))


def _polish_attainment(P: HomPoly, Q: HomPoly, x: np.ndarray, cfg: OptimConfig):
    """Pattern-search walk along the attainment set, re-norming y* each step.

    Every round probes all scales and axis directions in one batch; moves
    are accepted only when the point stays numerically attained (residual
    <= ATTAIN_TOL), so slice relaxation cannot inflate the value.
    """
    dom, cod = Q.domain, Q.codomain
    x = np.asarray(x, dtype=dom.dtype)
    best_v, _ = dual_face_argmax(cod, Q.evaluate(x), P.evaluate(x))
    n = dom.real_dim
    offsets = np.concatenate([
        s * np.concatenate([np.eye(n), -np.eye(n)], axis=0) for s in _POLISH_SCALES
    ])
    for _ in range(60):
        U = real_embed(dom, x)[None, :] + offsets
        X = real_unembed(dom, U).astype(dom.dtype, copy=False)
        Xn = norm_batch(dom, X)
        X = X / np.where(Xn > 0, Xn, 1.0)[:, None]
        Y = Q.evaluate_many(X)
        res = 1.0 - norm_batch(cod, Y)
        ok = res <= ATTAIN_TOL
        if not np.any(ok):
            break
        V = P.evaluate_many(X)
        vals = np.where(ok, dual_face_value_batch(cod, np.where(ok[:, None], Y, 1.0), V), -1.0)
        j = int(np.argmax(vals))
        if vals[j] > best_v * (1.0 + 1e-15) and vals[j] > best_v + 1e-16:
            best_v = float(vals[j])
            x = X[j]
        else:
            break
    val, b = dual_face_argmax(cod, Q.evaluate(x), P.evaluate(x))
    return x, b, val


def numerical_radius(P: HomPoly, Q: HomPoly, cfg: OptimConfig,
                     eta: float = DEFAULT_ETA,
                     ladder: tuple = DEFAULT_LADDER,
                     attainment=None) -> RadiusEstimate:
    """Numerical radius of P with respect to Q, attainment value first.

    Runs the attainment enumeration and the full delta ladder; the two
    must agree at the narrowest rung within ``cfg.cross_tol`` or the
    estimate is flagged ``inconsistent`` (an error beyond ten times the
    tolerance).

    ``attainment`` may carry a precomputed ``attainment_candidates(Q,
    eta, cfg)`` result so batch workloads over one Q pay for the sweep
    once.
    """
    _check_compat(P, Q)
    dom, cod = Q.domain, Q.codomain
    pts, qvals, best_q = attainment_candidates(Q, eta, cfg) if attainment is None else attainment
    if best_q < 1.0 - eta:
        raise NoAttainment(f"no attainment: estimated sup {best_q} < 1 - eta")

    X = pts
    residuals = 1.0 - qvals
    Y = Q.evaluate_many(X)
    V = P.evaluate_many(X)
    face_vals = dual_face_value_batch(cod, Y, V)
    exact = residuals <= ATTAIN_TOL

    cand: list[tuple[float, np.ndarray]] = []
    if np.any(exact):
        idx = np.flatnonzero(exact)
        j = idx[int(np.argmax(face_vals[idx]))]
        cand.append((float(face_vals[j]), X[j]))
    # second-best exact component, if distinct, for polish diversity
    if np.count_nonzero(exact) > 1:
        idx = np.flatnonzero(exact)
        order = idx[np.argsort(-face_vals[idx], kind="stable")]
        cand.append((float(face_vals[order[1]]), X[order[1]]))

    pull_idx = np.flatnonzero(~exact)
    pull_idx = pull_idx[np.argsort(-face_vals[pull_idx], kind="stable")][:16]
    for i in pull_idx:
        xp, res = _pull_to_attainment(Q, X[i], cfg)
        if res <= ATTAIN_TOL:
            val, _ = dual_face_argmax(cod, Q.evaluate(xp), P.evaluate(xp))
            cand.append((val, xp))

    # delta ladder, wide slices first so witnesses continue down to the
    # attainment set (flat-face geometries are only reachable this way);
    # the attainment anchor stays seeded at every rung, it is feasible
    # for every delta
    anchor: list = []
    if cand:
        top = max(cand, key=lambda t: t[0])
        _, b0 = dual_face_argmax(cod, Q.evaluate(top[1]), P.evaluate(top[1]))
        anchor.append((top[1], b0))
    att_order = np.argsort(-face_vals, kind="stable")[:16]
    pool = _build_slice_pool(P, Q, cfg, extra_points=[X[i] for i in att_order])
    carry: list = []
    rungs: dict[float, RadiusEstimate] = {}
    for delta in sorted(ladder, reverse=True):
        est = v_delta(P, Q, delta, cfg, seed_pairs=tuple(carry[:4] + anchor), pool=pool)
        rungs[delta] = est
        if est.witness is not None:
            carry = [(est.witness.x, est.witness.y_star)] + carry[:3]

    flags: list[str] = []
    d_min = min(ladder)
    w = rungs[d_min].witness
    if w is not None:
        if w.residual <= ATTAIN_TOL:
            xp, res = w.x, w.residual
        else:
            xp, res = _pull_to_attainment(Q, w.x, cfg)
        if res <= ATTAIN_TOL:
            val, _ = dual_face_argmax(cod, Q.evaluate(xp), P.evaluate(xp))
            cand.append((val, xp))

    if not cand:
        # nothing numerically attained; report the best near-attainment
        # pairing and say so
        flags.append("attainment_weak")
        j = int(np.argmax(face_vals))
        cand.append((float(face_vals[j]), X[j]))

    best_val, best_x = max(cand, key=lambda t: t[0])
    best_x, best_b, best_val = _polish_attainment(P, Q, best_x, cfg)

    # monotone ladder: a witness for a narrow slice is feasible in every
    # wider one, so carry values up
    asc = sorted(ladder)
    lvals = []
    running = -math.inf
    for d in asc:
        running = max(running, rungs[d].value)
        lvals.append((d, running))

    ref = lvals[0][1]
    dev = abs(best_val - ref)
    if dev > cfg.cross_tol:
        flags.append("inconsistent")
    if dev > 10.0 * cfg.cross_tol:
        raise InconsistentRadius(
            f"attainment {best_val} vs ladder {ref} at delta={d_min}: |diff|={dev}"
        )

    witness = _make_witness(P, Q, best_x, best_b)
    return RadiusEstimate(
        value=best_val,
        method="attainment",
        witness=witness,
        ladder=tuple(lvals),
        flags=tuple(flags),
    )


def delta_ladder_estimate(P: HomPoly, Q: HomPoly, cfg: OptimConfig,
                          deltas: tuple = DEFAULT_LADDER) -> RadiusEstimate:
    """Standalone continuation run of the delta ladder.

    Rungs run from the widest slice to the narrowest, each seeded with
    the previous witness; the reported value is the narrowest rung's
    estimate with the monotone ladder attached.
    """
    _check_compat(P, Q)
    pool = _build_slice_pool(P, Q, cfg)
    carry: list = []
    rungs: dict[float, RadiusEstimate] = {}
    for delta in sorted(deltas, reverse=True):
        est = v_delta(P, Q, delta, cfg, seed_pairs=tuple(carry[:4]), pool=pool)
        rungs[delta] = est
        if est.witness is not None:
            carry = [(est.witness.x, est.witness.y_star)] + carry[:3]
    asc = sorted(deltas)
    lvals = []
    running = -math.inf
    for d in asc:
        running = max(running, rungs[d].value)
        lvals.append((d, running))
    bottom = rungs[asc[0]]
    return RadiusEstimate(
        value=bottom.value,
        method="delta_ladder",
        witness=bottom.witness,
        ladder=tuple(lvals),
        flags=bottom.flags,
    )


def _unit_thetas(space: SpaceDescriptor, theta_points: int) -> np.ndarray:
    if space.is_complex:
        j = np.arange(theta_points)
        return np.exp(2j * math.pi * j / theta_points)
    return np.array([1.0, -1.0])


def radius_via_limit(P: HomPoly, Q: HomPoly, cfg: OptimConfig,
                     theta_points: int = 64,
                     alpha0: float = 1e-2,
                     max_rungs: int = 14,
                     stab_tol: float = 1e-7,
                     norm_fn=None) -> RadiusEstimate:
    """Radius via the norm-derivative formula.

    For each unit scalar theta the quotient (||Q + alpha*theta*P|| - 1) /
    alpha decreases to the directional derivative as alpha drops; a
    two-point Richardson step removes the leading error. The alpha ladder
    halves from ``alpha0`` and stops once the extrapolant stabilizes.
    """
    _check_compat(P, Q)
    if norm_fn is None:
        norm_fn = lambda R: poly_norm(R, cfg).value
    thetas = _unit_thetas(Q.domain, theta_points)
    flags: set[str] = set()
    best_val = -math.inf
    best_ladder: list = []
    for theta in thetas:
        qs: list[tuple[float, float]] = []
        rich: list[float] = []
        alpha = alpha0
        for _ in range(max_rungs):
            shifted = Q + P.scale(theta * alpha)
            qj = (norm_fn(shifted) - 1.0) / alpha
            if qs and qj > qs[-1][1] + 1e-6:
                flags.add("oscillating_quotients")
            qs.append((alpha, qj))
            if len(qs) >= 2:
                rich.append(2.0 * qs[-1][1] - qs[-2][1])
                if len(rich) >= 2 and abs(rich[-1] - rich[-2]) <= stab_tol:
                    break
            alpha *= 0.5
        val = rich[-1] if rich else qs[-1][1]
        if val > best_val:
            best_val = val
            best_ladder = qs
    value = max(0.0, best_val)
    theta_gap = value * (1.0 - math.cos(math.pi / theta_points)) if Q.domain.is_complex else 0.0
    return RadiusEstimate(
        value=value,
        method="limit_formula",
        witness=None,
        ladder=tuple(best_ladder),
        flags=tuple(sorted(flags)),
        theta_gap=theta_gap,
    )


def convex_hull_2d(points: np.ndarray) -> np.ndarray:
    """Convex hull of planar points by the monotone chain, CCW order."""
    pts = np.unique(np.asarray(points, dtype=np.float64).reshape(-1, 2), axis=0)
    if pts.shape[0] <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def range_cloud(P: HomPoly, Q: HomPoly, delta: float, count: int, seed: int,
                cfg: OptimConfig) -> RangeCloud:
    """Up to ``count`` pairing values with residual below delta, plus hull.

    The attached radius is the delta-slice estimate seeded with the very
    pairs emitted here, so every point is dominated by it.
    """
    _check_compat(P, Q)
    if count < 1:
        raise PolyError("count must be >= 1")
    dom, cod = Q.domain, Q.codomain
    pool = _build_slice_pool(P, Q, cfg, seed=seed)
    pairs = [(pool.X[i], pool.B[i]) for i in np.flatnonzero(pool.re > 1.0 - delta)]
    # a few plain norming functionals per sampled point for diversity
    extra = []
    for x in sample_sphere(dom, max(8, count // 4), seed + 1):
        y = Q.evaluate(x)
        if float(norm_batch(cod, y[None, :])[0]) > 1.0 - delta:
            for b in norming_functionals(cod, y, cap=4):
                extra.append((x, b))
    pairs.extend(extra)
    vd = v_delta(P, Q, delta, cfg, seed_pairs=tuple(pairs), pool=pool)
    values = []
    for x, b in pairs:
        residual, value = _pair_data(P, Q, x, b)
        if residual < delta:
            values.append(value)
    if vd.witness is not None:
        values.append(vd.witness.value)
    if not values:
        raise EmptySlice("empty δ-slice")
    pts = np.asarray(values[:count])
    if dom.is_complex:
        hull = convex_hull_2d(np.stack([pts.real, pts.imag], axis=1))
        hull = hull[:, 0] + 1j * hull[:, 1]
    else:
        hull = np.array([float(pts.real.min()), float(pts.real.max())])
    return RangeCloud(points=pts, delta=delta, hull=hull, radius=vd.value)
