"""Upper bounds on the polynomial numerical index, spear margins, and
operator-based bounds.

The index of (X, Y) with respect to Q is an infimum of radii over all
norm-one polynomials, so any candidate family yields an upper bound.
Random coefficient draws alone miss the extremal polynomials; structured
candidates (output permutations, sign flips, operators composed with Q)
are always injected, and callers may feed their own.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .optim import OptimConfig, attainment_candidates, maximize_on_sphere, poly_norm
from .poly import HomPoly, LinOp, adjoint_apply, compose_linear, monomial_exponents
from .range import RadiusEstimate, numerical_radius, radius_via_limit
from .spaces import (
    SpaceDescriptor,
    dual_face_value_batch,
    norm_batch,
    sample_sphere,
)

__all__ = [
    "IndexEstimate",
    "SpearReport",
    "DegenerateComposition",
    "random_unit_poly",
    "structured_candidates",
    "index_upper_bound",
    "spear_margin",
    "op_norm",
    "op_numerical_radius",
    "operator_bound",
    "zero_radius_witness_search",
    "adjoint_radius_via_limit",
]

_NORM_FLOOR = 1e-9


class DegenerateComposition(RuntimeError):
    """T o Q vanishes; the operator bound is undefined."""


@dataclass(frozen=True)
class IndexEstimate:
    """min over tested norm-one polynomials of their radius: an upper bound."""

    upper_bound: float
    argmin_poly: HomPoly
    samples: int
    per_sample: tuple

    def to_json(self) -> dict:
        from .poly import poly_to_json

        return {
            "upper_bound": self.upper_bound,
            "samples": self.samples,
            "per_sample": [[pid, float(r)] for pid, r in self.per_sample],
            "argmin": poly_to_json(self.argmin_poly),
        }


@dataclass(frozen=True)
class SpearReport:
    lam: float
    worst_margin: float
    worst_poly: HomPoly | None

    def to_json(self) -> dict:
        from .poly import poly_to_json

        return {
            "lambda": self.lam,
            "worst_margin": self.worst_margin,
            "worst_poly": poly_to_json(self.worst_poly) if self.worst_poly else None,
        }


def random_unit_poly(degree: int, domain: SpaceDescriptor, codomain: SpaceDescriptor,
                     rng: np.random.Generator, cfg: OptimConfig) -> HomPoly | None:
    """Gaussian coefficients on every monomial, normalized to unit norm."""
    alphas = monomial_exponents(domain.dim, degree)
    terms = []
    for out in range(codomain.dim):
        for alpha in alphas:
            c = rng.standard_normal()
            if domain.is_complex:
                c = c + 1j * rng.standard_normal()
            terms.append((out, alpha, c))
    P = HomPoly(degree, domain, codomain, tuple(terms))
    nv = poly_norm(P, cfg).value
    if nv < _NORM_FLOOR:
        return None
    return P.scale(1.0 / nv)


def _signed_permutations(dim: int, cap: int = 64):
    eye = np.eye(dim)
    count = 0
    for perm in itertools.permutations(range(dim)):
        pm = eye[list(perm)]
        for signs in itertools.product((1.0, -1.0), repeat=dim):
            yield np.diag(signs) @ pm
            count += 1
            if count >= cap:
                return


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def structured_candidates(Q: HomPoly, cfg: OptimConfig) -> list[tuple[str, HomPoly]]:
    """The T o Q family over signed permutations (plus a rotation when the
    codomain is the Euclidean plane)."""
    cod = Q.codomain
    out = []
    for i, M in enumerate(_signed_permutations(cod.dim)):
        T = LinOp(M.astype(cod.dtype), cod)
        cand = compose_linear(T, Q)
        if not cand.is_zero():
            out.append((f"tq_signed_perm_{i}", cand))
    if not cod.is_complex and cod.p == 2.0 and cod.dim == 2:
        T = LinOp(_rotation(math.pi / 2), cod)
        out.append(("tq_rotation_quarter", compose_linear(T, Q)))
    return out


def index_upper_bound(Q: HomPoly, n_samples: int, seed: int, cfg: OptimConfig,
                      extra_candidates=()) -> IndexEstimate:
    """Upper bound on the index of the pair with respect to Q.

    Draws ``n_samples`` random unit polynomials, adds the structured
    family and any caller candidates, normalizes each by its estimated
    norm, and takes the minimum radius. Reduction is deterministic in
    candidate order.
    """
    rng = np.random.default_rng(seed)
    cands: list[tuple[str, HomPoly]] = []
    for j in range(n_samples):
        P = random_unit_poly(Q.degree, Q.domain, Q.codomain, rng, cfg)
        if P is not None:
            cands.append((f"random_{j}", P))
    cands.extend(structured_candidates(Q, cfg))
    for j, P in enumerate(extra_candidates):
        cands.append((f"extra_{j}", P))

    att = attainment_candidates(Q, 1e-6, cfg)
    per = []
    best: tuple[float, HomPoly] | None = None
    for pid, P in cands:
        nv = poly_norm(P, cfg).value
        if nv < _NORM_FLOOR:
            continue
        Pn = P.scale(1.0 / nv)
        r = numerical_radius(Pn, Q, cfg, attainment=att).value
        per.append((pid, r))
        if best is None or r < best[0]:
            best = (r, Pn)
    if best is None:
        raise ValueError("no usable candidate polynomial")
    return IndexEstimate(
        upper_bound=best[0],
        argmin_poly=best[1],
        samples=len(per),
        per_sample=tuple(per),
    )


def _theta_grid(space: SpaceDescriptor, points: int = 64) -> np.ndarray:
    if space.is_complex:
        return np.exp(2j * math.pi * np.arange(points) / points)
    return np.array([1.0, -1.0])


def spear_margin(Q: HomPoly, trials: int, lam: float, seed: int, cfg: OptimConfig,
                 extra_candidates=(), theta_points: int = 64) -> SpearReport:
    """Worst value of max_theta ||Q + theta P|| - 1 - lam ||P|| over tested P.

    A negative margin certifies that the index of Q falls below lam.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError("lambda must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    cands: list[HomPoly] = []
    for _ in range(trials):
        P = random_unit_poly(Q.degree, Q.domain, Q.codomain, rng, cfg)
        if P is not None:
            cands.append(P)
    cands.extend(extra_candidates)
    thetas = _theta_grid(Q.domain, theta_points)
    worst = math.inf
    worst_poly: HomPoly | None = None
    for P in cands:
        nP = 0.0 if P.is_zero() else poly_norm(P, cfg).value
        peak = max(poly_norm(Q + P.scale(th), cfg).value for th in thetas)
        margin = peak - 1.0 - lam * nP
        if margin < worst:
            worst = margin
            worst_poly = P
    return SpearReport(lam=lam, worst_margin=worst, worst_poly=worst_poly)


def op_norm(T: LinOp, cfg: OptimConfig) -> float:
    space = T.space

    def f(X):
        return norm_batch(space, T.apply_many(X))

    return maximize_on_sphere(space, f, cfg).value


def op_numerical_radius(T: LinOp, cfg: OptimConfig) -> float:
    """Classical numerical radius sup{|x*(Tx)|: x*(x) = ||x|| = 1}.

    The inner sup over norming functionals of x has a closed form on the
    dual face, so this is a single sphere maximization.
    """
    space = T.space

    def f(X):
        return dual_face_value_batch(space, X, T.apply_many(X))

    return maximize_on_sphere(space, f, cfg).value


def operator_bound(Q: HomPoly, T: LinOp, cfg: OptimConfig) -> float:
    """v(T) / ||T o Q||; every such value upper-bounds the index of Q."""
    TQ = compose_linear(T, Q)
    nv = poly_norm(TQ, cfg).value
    if nv <= _NORM_FLOOR:
        raise DegenerateComposition("degenerate composition: ||T o Q|| ~ 0")
    return op_numerical_radius(T, cfg) / nv


def zero_radius_witness_search(Y: SpaceDescriptor, eps: float,
                               cfg: OptimConfig) -> LinOp | None:
    """Search rotations and signed permutations for a norm-one operator
    with vanishing numerical radius; None when the family has none."""
    cands: list[np.ndarray] = []
    if not Y.is_complex and Y.p == 2.0 and Y.dim % 2 == 0:
        block = _rotation(math.pi / 2)
        M = np.zeros((Y.dim, Y.dim))
        for i in range(0, Y.dim, 2):
            M[i:i + 2, i:i + 2] = block
        cands.append(M)
    cands.extend(M.astype(Y.dtype) for M in _signed_permutations(Y.dim))
    for M in cands:
        T = LinOp(np.asarray(M, dtype=Y.dtype), Y)
        if op_numerical_radius(T, cfg) <= eps and op_norm(T, cfg) >= 1.0 - eps:
            return T
    return None


def adjoint_radius_via_limit(P: HomPoly, Q: HomPoly, cfg: OptimConfig,
                             theta_points: int = 64) -> RadiusEstimate:
    """Limit-formula radius computed through the adjoint operators.

    The rung norms are operator norms of R*: y* -> y* o R, realized as the
    sup of poly_norm(y* o R) over a dual-sphere grid. For scalar codomains
    a single unit functional suffices (phases do not change a sup norm).
    """
    cod = Q.codomain
    if cod.dim == 1:
        duals = [np.ones(1, dtype=cod.dtype)]
    else:
        duals = sample_sphere(cod.dual(), 8, 0)

    def adjoint_norm(R: HomPoly) -> float:
        return max(poly_norm(adjoint_apply(R, b), cfg).value for b in duals)

    return radius_via_limit(P, Q, cfg, theta_points=theta_points, norm_fn=adjoint_norm)
