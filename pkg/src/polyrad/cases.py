"""Executable catalogue of reference cases with certified expectations.

Each case builds its polynomials, runs the declared estimators under a
pinned optimizer configuration, and compares against expected values.
Expected values are stored as exact expressions (1/2, 2/(3*sqrt 3), ...)
and evaluated to doubles at compare time. Every expectation records
where it comes from:

* ``analytic``   - a worked closed-form value,
* ``definition`` - immediate from definitions (trivial),
* ``oracle``     - certified by an independent numerical oracle.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .index import (
    index_upper_bound,
    op_numerical_radius,
    random_unit_poly,
)
from .optim import GRID_CERTIFIED, OptimConfig, poly_norm
from .poly import HomPoly, LinOp, SumRecipe, direct_sum, embed_block, hom_poly
from .range import numerical_radius, radius_via_limit
from .spaces import SpaceDescriptor

__all__ = [
    "Check",
    "CaseReport",
    "CaseSpec",
    "case_catalog",
    "case_names",
    "run_case",
    "run_all",
    "scalar_poly",
    "build_l1sq_pair",
    "build_lpsq_pair",
    "build_linf_cubic_pair",
    "build_linf_sum_instance",
    "L1SQ_RADIUS",
    "LINF_CUBIC_RADIUS",
]

L1SQ_RADIUS = 0.5
LINF_CUBIC_RADIUS = 2.0 / (3.0 * math.sqrt(3.0))


@dataclass(frozen=True)
class Check:
    """One compared quantity; ``kind`` is abs (|c-e| <= tol) or le (c <= e + tol)."""

    name: str
    computed: float
    expected: float
    tol: float
    kind: str
    source: str

    @property
    def passed(self) -> bool:
        if self.kind == "le":
            return self.computed <= self.expected + self.tol
        return abs(self.computed - self.expected) <= self.tol

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "computed": self.computed,
            "expected": self.expected,
            "tol": self.tol,
            "kind": self.kind,
            "source": self.source,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class CaseReport:
    name: str
    checks: tuple
    wall_time: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "wall_time": self.wall_time,
            "checks": [c.to_json() for c in self.checks],
        }


@dataclass(frozen=True)
class CaseSpec:
    name: str
    description: str
    config: OptimConfig
    runner: object


# ---------------------------------------------------------------------
# builders


def scalar_poly(k: int, field: str, coeff=1.0) -> HomPoly:
    """c * a^k on the scalar field."""
    sp = SpaceDescriptor(field, 2.0, 1)
    return hom_poly(k, sp, sp, [(0, (k,), coeff)])


def build_l1sq_pair() -> tuple[HomPoly, HomPoly]:
    """Q(x) = (x1^2, x2^2) on l1^2 and the half-coefficient perturbation
    P(x) = (x1^2/2 + 2 x1 x2, -x2^2/2 - x1 x2)."""
    l1 = SpaceDescriptor("real", 1.0, 2)
    Q = hom_poly(2, l1, l1, [(0, (2, 0), 1.0), (1, (0, 2), 1.0)])
    P = hom_poly(2, l1, l1, [
        (0, (2, 0), 0.5), (0, (1, 1), 2.0),
        (1, (0, 2), -0.5), (1, (1, 1), -1.0),
    ])
    return Q, P


def build_lpsq_pair(p: float, k: int) -> tuple[HomPoly, HomPoly]:
    """Q(x) = (x1^k, x2^k) on lp^2 and its coordinate swap P(x) = (x2^k, x1^k)."""
    lp = SpaceDescriptor("real", float(p), 2)
    Q = hom_poly(k, lp, lp, [(0, (k, 0), 1.0), (1, (0, k), 1.0)])
    P = hom_poly(k, lp, lp, [(0, (0, k), 1.0), (1, (k, 0), 1.0)])
    return Q, P


def build_linf_cubic_pair() -> tuple[HomPoly, HomPoly]:
    """Q(x) = (x1^3, x2^3) on real linf^2 and P(x) = (x1^2 x2 - x2^3, 0)."""
    li = SpaceDescriptor("real", math.inf, 2)
    Q = hom_poly(3, li, li, [(0, (3, 0), 1.0), (1, (0, 3), 1.0)])
    P = hom_poly(3, li, li, [(0, (2, 1), 1.0), (0, (0, 3), -1.0)])
    return Q, P


def build_linf_sum_instance(seed: int, cfg: OptimConfig):
    """A 2-summand sup-norm sum: random norm-one block plus a scalar block.

    Returns (Q_sum, embedded P, component pair (R, Q1)).
    """
    linf2 = SpaceDescriptor("real", math.inf, 2)
    r1 = SpaceDescriptor("real", 2.0, 1)
    rng = np.random.default_rng(seed)
    Q1 = random_unit_poly(2, linf2, linf2, rng, cfg)
    R = random_unit_poly(2, linf2, linf2, rng, cfg)
    if Q1 is None or R is None:
        raise RuntimeError("degenerate random draw")
    Q2 = hom_poly(2, r1, r1, [(0, (2,), 1.0)])
    Qsum = direct_sum(SumRecipe("ell_inf", (Q1, Q2)))
    P_emb = embed_block(R, Qsum.domain, Qsum.codomain)
    return Qsum, P_emb, (R, Q1)


# ---------------------------------------------------------------------
# runners


def _run_scalar(cfg: OptimConfig) -> list[Check]:
    checks = []
    for field in ("real", "complex"):
        for k in range(1, 7):
            Q = scalar_poly(k, field)
            est = index_upper_bound(Q, n_samples=100, seed=20_000 + k, cfg=cfg)
            dev = max(abs(r - 1.0) for _, r in est.per_sample)
            checks.append(Check(
                f"radius_unit_dev_{field}_k{k}", dev, 0.0, 1e-9, "abs", "analytic"))
            checks.append(Check(
                f"index_{field}_k{k}", est.upper_bound, 1.0, 1e-9, "abs", "analytic"))
    return checks


def _run_l1sq(cfg: OptimConfig) -> list[Check]:
    Q, P = build_l1sq_pair()
    checks = []
    npe = poly_norm(P, cfg)
    checks.append(Check("poly_norm_P", npe.value, 1.0, 1e-6, "abs", "analytic"))
    checks.append(Check(
        "poly_norm_P_grid_certified",
        1.0 if npe.status == GRID_CERTIFIED else 0.0, 1.0, 0.0, "abs", "definition"))
    r = numerical_radius(P, Q, cfg)
    checks.append(Check("radius_attainment", r.value, L1SQ_RADIUS, 1e-9, "abs", "analytic"))
    checks.append(Check(
        "radius_ladder_agreement", abs(r.value - r.ladder[0][1]), 0.0, 5e-3, "abs", "definition"))
    rl = radius_via_limit(P, Q, cfg)
    checks.append(Check("radius_limit", rl.value, L1SQ_RADIUS, 5e-3, "abs", "analytic"))
    est = index_upper_bound(Q, n_samples=6, seed=31, cfg=cfg, extra_candidates=[P])
    checks.append(Check("index_upper_bound", est.upper_bound, L1SQ_RADIUS, 1e-6, "le", "analytic"))
    return checks


def _run_lpsq(cfg: OptimConfig) -> list[Check]:
    checks = []
    for p in (1.5, 2.0, 3.0):
        base_k = math.ceil(p)
        for k in (base_k, base_k + 1):
            Q, P = build_lpsq_pair(p, k)
            tag = f"p{p}_k{k}"
            npe = poly_norm(P, cfg)
            checks.append(Check(f"poly_norm_P_{tag}", npe.value, 1.0, 1e-6, "abs", "analytic"))
            r = numerical_radius(P, Q, cfg)
            checks.append(Check(f"radius_{tag}", r.value, 0.0, 1e-6, "le", "analytic"))
            est = index_upper_bound(Q, n_samples=2, seed=40 + k, cfg=cfg, extra_candidates=[P])
            checks.append(Check(f"index_{tag}", est.upper_bound, 0.0, 1e-6, "le", "analytic"))
    return checks


def _run_linf_cubic(cfg: OptimConfig) -> list[Check]:
    Q, P = build_linf_cubic_pair()
    checks = []
    npe = poly_norm(P, cfg)
    checks.append(Check("poly_norm_P", npe.value, 1.0, 1e-6, "abs", "analytic"))
    r = numerical_radius(P, Q, cfg)
    checks.append(Check("radius_attainment", r.value, LINF_CUBIC_RADIUS, 1e-6, "abs", "analytic"))
    w = r.witness
    checks.append(Check(
        "witness_x1_modulus", abs(abs(w.x[0]) - 1.0), 0.0, 1e-4, "abs", "analytic"))
    checks.append(Check(
        "witness_x2_modulus", abs(abs(w.x[1]) - 1.0 / math.sqrt(3.0)), 0.0, 1e-4, "abs", "analytic"))
    checks.append(Check(
        "radius_ladder_agreement", abs(r.value - r.ladder[0][1]), 0.0, 5e-3, "abs", "definition"))
    rl = radius_via_limit(P, Q, cfg)
    checks.append(Check("radius_limit", rl.value, LINF_CUBIC_RADIUS, 5e-3, "abs", "analytic"))
    return checks


def _run_rotation_codomain(cfg: OptimConfig) -> list[Check]:
    l2 = SpaceDescriptor("real", 2.0, 2)
    rot = LinOp(np.array([[0.0, -1.0], [1.0, 0.0]]), l2)
    checks = [Check(
        "rotation_numerical_radius", op_numerical_radius(rot, cfg), 0.0, 1e-9, "le", "oracle")]
    worst = 0.0
    for i in range(10):
        rng = np.random.default_rng(500 + i)
        Q = random_unit_poly(2, l2, l2, rng, cfg)
        if Q is None:
            continue
        est = index_upper_bound(Q, n_samples=1, seed=600 + i, cfg=cfg)
        worst = max(worst, est.upper_bound)
    checks.append(Check("index_bound_worst_of_10", worst, 0.0, 1e-3, "le", "oracle"))
    return checks


def _run_linf_sum_embed(cfg: OptimConfig) -> list[Check]:
    worst_dev = 0.0
    worst_norm = 0.0
    for i in range(20):
        Qsum, P_emb, (R, Q1) = build_linf_sum_instance(1000 + i, cfg)
        worst_norm = max(worst_norm, abs(poly_norm(Qsum, cfg).value - 1.0))
        r_comp = numerical_radius(R, Q1, cfg).value
        r_emb = numerical_radius(P_emb, Qsum, cfg).value
        worst_dev = max(worst_dev, abs(r_emb - r_comp))
    return [
        Check("embedded_vs_component_radius", worst_dev, 0.0, 5e-3, "abs", "oracle"),
        Check("sum_poly_norm", worst_norm, 0.0, 1e-6, "abs", "definition"),
    ]


# ---------------------------------------------------------------------
# catalogue


def case_catalog() -> list[CaseSpec]:
    return [
        CaseSpec(
            "scalar_k",
            "scalar field, every degree 1..6, both fields: every unit "
            "polynomial has radius one and the index is one",
            OptimConfig(restarts=1, max_iters=12, grid_resolution=24, seed=0),
            _run_scalar,
        ),
        CaseSpec(
            "l1sq_k2",
            "Q(x)=(x1^2,x2^2) on l1^2: the half-coefficient perturbation "
            "has norm one and radius 1/2, so the index is at most 1/2",
            OptimConfig(restarts=8, max_iters=120, grid_resolution=4096, seed=1),
            _run_l1sq,
        ),
        CaseSpec(
            "lpsq_k_ge_p",
            "Q(x)=(x1^k,x2^k) on lp^2, k >= p: the coordinate swap has "
            "norm one and radius zero, so the index vanishes",
            OptimConfig(restarts=6, max_iters=100, grid_resolution=2048, seed=1),
            _run_lpsq,
        ),
        CaseSpec(
            "linf_sq_k3_real",
            "Q(x)=(x1^3,x2^3) on real linf^2: P(x)=(x1^2 x2 - x2^3, 0) has "
            "radius 2/(3 sqrt 3), attained at (+-1, +-1/sqrt 3)",
            OptimConfig(restarts=6, max_iters=120, grid_resolution=4096, seed=1),
            _run_linf_cubic,
        ),
        CaseSpec(
            "rotation_codomain",
            "Euclidean-plane codomain: the quarter rotation has zero "
            "numerical radius, forcing the index of every Q to zero",
            OptimConfig(restarts=4, max_iters=80, grid_resolution=1024, seed=2),
            _run_rotation_codomain,
        ),
        CaseSpec(
            "linf_sum_embed",
            "two-summand sup-norm sums: embedding a block polynomial "
            "preserves its numerical radius",
            OptimConfig(restarts=6, max_iters=100, grid_resolution=2048, seed=1),
            _run_linf_sum_embed,
        ),
    ]


def case_names() -> list[str]:
    return [c.name for c in case_catalog()]


def run_case(name: str, cfg: OptimConfig | None = None) -> CaseReport:
    for spec in case_catalog():
        if spec.name == name:
            t0 = time.perf_counter()
            checks = spec.runner(cfg or spec.config)
            return CaseReport(name=name, checks=tuple(checks),
                              wall_time=time.perf_counter() - t0)
    raise KeyError(f"unknown case {name!r}")


def _worker_cap() -> int:
    raw = os.environ.get("POLYRAD_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_all(cfg: OptimConfig | None = None, max_workers: int | None = None) -> list[CaseReport]:
    """Run every case; results are ordered by catalogue position.

    Cases are independent; POLYRAD_THREADS (or ``max_workers``) caps the
    worker pool.
    """
    names = case_names()
    workers = min(len(names), max_workers if max_workers is not None else _worker_cap())
    if workers <= 1:
        return [run_case(n, cfg) for n in names]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_case, n, cfg) for n in names]
        return [f.result() for f in futures]
