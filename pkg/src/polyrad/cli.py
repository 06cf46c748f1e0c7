"""Command-line surface: norm, radius, range, index, case.

Exit codes: 0 ok, 2 input error, 3 computation error, 4 precondition
violated (e.g. Q not norm-one). Reports are JSON (range clouds also CSV);
output is byte-identical across runs for identical inputs and seeds.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from .cases import case_names, run_all, run_case
from .index import DegenerateComposition, index_upper_bound
from .optim import NoAttainment, NonFiniteObjective, OptimConfig, poly_norm
from .poly import PolyError, load_poly
from .range import (
    DEFAULT_LADDER,
    EmptySlice,
    InconsistentRadius,
    delta_ladder_estimate,
    numerical_radius,
    radius_via_limit,
    range_cloud,
)
from .spaces import SpaceError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTE = 3
EXIT_PRECONDITION = 4

_NORM_ONE_TOL = 1e-4


class InputError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """CLI-level configuration; JSON key "optim" embeds the engine knobs."""

    optim: OptimConfig = field(default_factory=OptimConfig)
    delta_ladder: tuple = DEFAULT_LADDER
    theta_points: int = 64
    output: str | None = None
    format: str = "json"

    def __post_init__(self) -> None:
        ladder = tuple(float(d) for d in self.delta_ladder)
        if not ladder or any(d <= 0 for d in ladder):
            raise InputError("delta ladder entries must be positive")
        if any(a <= b for a, b in zip(ladder, ladder[1:])):
            raise InputError("delta ladder must be strictly decreasing")
        object.__setattr__(self, "delta_ladder", ladder)
        if self.format not in ("json", "csv"):
            raise InputError(f"unknown format {self.format!r}")

    @staticmethod
    def from_file(path: str | None) -> "RunConfig":
        if path is None:
            return RunConfig()
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        try:
            optim = OptimConfig.from_json(data.get("optim", {})) if data.get("optim") \
                else OptimConfig()
            return RunConfig(
                optim=optim,
                delta_ladder=tuple(data.get("delta_ladder", DEFAULT_LADDER)),
                theta_points=int(data.get("theta_points", 64)),
                output=data.get("output"),
                format=data.get("format", "json"),
            )
        except (TypeError, ValueError) as exc:
            raise InputError(f"malformed config: {exc}") from exc


def _emit(text: str, args, rc: RunConfig) -> None:
    target = args.output or rc.output
    if target:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _load(path: str):
    try:
        return load_poly(path)
    except (PolyError, SpaceError) as exc:
        raise InputError(str(exc)) from exc


def _require_norm_one(Q, cfg: OptimConfig) -> None:
    value = poly_norm(Q, cfg).value
    if abs(value - 1.0) > _NORM_ONE_TOL:
        raise PreconditionError(f"Q not norm-one (estimated {value})")


def _cmd_norm(args, rc: RunConfig) -> int:
    P = _load(args.poly)
    est = poly_norm(P, rc.optim)
    _emit(_dump(est.to_json()), args, rc)
    return EXIT_OK


def _cmd_radius(args, rc: RunConfig) -> int:
    P = _load(args.poly)
    Q = _load(args.q_poly)
    _require_norm_one(Q, rc.optim)
    payload: dict = {}
    if args.method in ("attain", "all"):
        payload["attain"] = numerical_radius(P, Q, rc.optim, ladder=rc.delta_ladder).to_json()
    if args.method in ("ladder", "all"):
        payload["ladder"] = delta_ladder_estimate(P, Q, rc.optim, rc.delta_ladder).to_json()
    if args.method in ("limit", "all"):
        payload["limit"] = radius_via_limit(
            P, Q, rc.optim, theta_points=rc.theta_points).to_json()
    if args.method == "all":
        a = payload["attain"]["value"]
        payload["agreement"] = {
            "attain_vs_ladder": abs(a - payload["ladder"]["value"]),
            "attain_vs_limit": abs(a - payload["limit"]["value"]),
        }
    if args.method != "all":
        payload = payload[args.method]
    _emit(_dump(payload), args, rc)
    return EXIT_OK


def _cmd_range(args, rc: RunConfig) -> int:
    P = _load(args.poly)
    Q = _load(args.q_poly)
    cloud = range_cloud(P, Q, args.delta, args.count, args.seed, rc.optim)
    fmt = args.format or rc.format
    if fmt == "csv":
        _emit(cloud.to_csv(), args, rc)
    else:
        _emit(_dump(cloud.to_json()), args, rc)
    return EXIT_OK


def _cmd_index(args, rc: RunConfig) -> int:
    Q = _load(args.q_poly)
    _require_norm_one(Q, rc.optim)
    est = index_upper_bound(Q, args.samples, args.seed, rc.optim)
    _emit(_dump(est.to_json()), args, rc)
    return EXIT_OK


def _cmd_case(args, rc: RunConfig) -> int:
    if args.all:
        reports = run_all()
        payload = {"cases": [r.to_json() for r in reports],
                   "passed": all(r.passed for r in reports)}
        _emit(_dump(payload), args, rc)
        return EXIT_OK if payload["passed"] else 1
    if args.name is None:
        raise InputError("give a case name or --all")
    try:
        report = run_case(args.name)
    except KeyError as exc:
        raise InputError(str(exc)) from exc
    _emit(_dump(report.to_json()), args, rc)
    return EXIT_OK if report.passed else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyrad",
        description="numerical ranges, radii and index bounds for "
                    "homogeneous polynomials on lp spaces",
    )
    parser.add_argument("--config", help="JSON run configuration")
    sub = parser.add_subparsers(dest="command", required=True)

    p_norm = sub.add_parser("norm", help="sup norm of a polynomial")
    p_norm.add_argument("poly")
    p_norm.add_argument("--output")

    p_rad = sub.add_parser("radius", help="numerical radius of P with respect to Q")
    p_rad.add_argument("poly")
    p_rad.add_argument("q_poly")
    p_rad.add_argument("--method", choices=("attain", "ladder", "limit", "all"),
                       default="all")
    p_rad.add_argument("--output")

    p_rng = sub.add_parser("range", help="sampled range cloud inside a delta slice")
    p_rng.add_argument("poly")
    p_rng.add_argument("q_poly")
    p_rng.add_argument("--delta", type=float, default=1e-6)
    p_rng.add_argument("--count", type=int, default=256)
    p_rng.add_argument("--seed", type=int, default=0)
    p_rng.add_argument("--format", choices=("json", "csv"))
    p_rng.add_argument("--output")

    p_idx = sub.add_parser("index", help="upper bound on the polynomial numerical index")
    p_idx.add_argument("q_poly")
    p_idx.add_argument("--samples", type=int, default=16)
    p_idx.add_argument("--seed", type=int, default=0)
    p_idx.add_argument("--output")

    p_case = sub.add_parser("case", help="run catalogue cases")
    p_case.add_argument("name", nargs="?")
    p_case.add_argument("--all", action="store_true")
    p_case.add_argument("--output")
    return parser


_HANDLERS = {
    "norm": _cmd_norm,
    "radius": _cmd_radius,
    "range": _cmd_range,
    "index": _cmd_index,
    "case": _cmd_case,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    try:
        rc = RunConfig.from_file(args.config)
        return _HANDLERS[args.command](args, rc)
    except (InputError, PolyError, SpaceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (EmptySlice, NoAttainment, NonFiniteObjective, InconsistentRadius,
            DegenerateComposition) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
