"""Sparse multi-index representation of k-homogeneous polynomials.

A polynomial P: X -> Y is stored as terms (out, alpha, coeff) where each
output coordinate j evaluates to sum of c * x**alpha over the terms with
out == j. The representation is canonical: terms sorted by (out, alpha),
duplicates merged, exact zeros dropped. The associated symmetric
multilinear form is never materialized.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .spaces import (
    COMPLEX,
    REAL,
    DimensionMismatch,
    SpaceDescriptor,
    SpaceError,
    as_vector,
)

__all__ = [
    "PolyError",
    "HomPoly",
    "LinOp",
    "SumRecipe",
    "hom_poly",
    "zero_poly",
    "monomial_exponents",
    "adjoint_apply",
    "compose_linear",
    "direct_sum",
    "embed_block",
    "poly_to_json",
    "poly_from_json",
    "load_poly",
    "dump_poly",
]


class PolyError(ValueError):
    """Invalid polynomial data or incompatible operands."""


def _canonical_terms(degree, domain, codomain, terms, merge: bool):
    seen: dict[tuple[int, tuple[int, ...]], complex] = {}
    for out, alpha, coeff in terms:
        out = int(out)
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != domain.dim:
            raise PolyError(f"multi-index {alpha} does not match domain dim {domain.dim}")
        if any(a < 0 for a in alpha):
            raise PolyError(f"negative exponent in {alpha}")
        if sum(alpha) != degree:
            raise PolyError(f"multi-index {alpha} has degree {sum(alpha)}, expected {degree}")
        if not 0 <= out < codomain.dim:
            raise PolyError(f"output index {out} out of range for dim {codomain.dim}")
        c = complex(coeff)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise PolyError("non-finite coefficient")
        if domain.field == REAL and c.imag != 0.0:
            raise PolyError("complex coefficient in a real polynomial")
        key = (out, alpha)
        if key in seen:
            if not merge:
                raise PolyError(f"duplicate term {key}")
            seen[key] += c
        else:
            seen[key] = c
    items = []
    for (out, alpha), c in seen.items():
        if c == 0:
            continue
        items.append((out, alpha, c if domain.field == COMPLEX else c.real))
    items.sort(key=lambda t: (t[0], t[1]))
    return tuple(items)


@dataclass(frozen=True)
class HomPoly:
    """A k-homogeneous polynomial between lp spaces, in monomial form."""

    degree: int
    domain: SpaceDescriptor
    codomain: SpaceDescriptor
    terms: tuple

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise PolyError("degree must be >= 1")
        if self.domain.field != self.codomain.field:
            raise PolyError("domain and codomain must share the field")
        object.__setattr__(
            self,
            "terms",
            _canonical_terms(self.degree, self.domain, self.codomain, self.terms, merge=True),
        )

    @cached_property
    def _arrays(self):
        if not self.terms:
            return (
                np.zeros((0, self.domain.dim), dtype=np.int64),
                np.zeros(0, dtype=self.domain.dtype),
                np.zeros((0, self.codomain.dim), dtype=np.float64),
            )
        alphas = np.array([t[1] for t in self.terms], dtype=np.int64)
        coeffs = np.array([t[2] for t in self.terms], dtype=self.domain.dtype)
        scatter = np.zeros((len(self.terms), self.codomain.dim), dtype=np.float64)
        for i, (out, _, _) in enumerate(self.terms):
            scatter[i, out] = 1.0
        return alphas, coeffs, scatter

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        """Evaluate at each row of an (m, dim) array; returns (m, codim)."""
        X = np.asarray(X, dtype=self.domain.dtype)
        if X.ndim != 2 or X.shape[1] != self.domain.dim:
            raise DimensionMismatch(f"expected (m, {self.domain.dim}) points, got {X.shape}")
        alphas, coeffs, scatter = self._arrays
        if alphas.shape[0] == 0:
            return np.zeros((X.shape[0], self.codomain.dim), dtype=self.codomain.dtype)
        mono = np.prod(X[:, None, :] ** alphas[None, :, :], axis=2)
        return (mono * coeffs) @ scatter

    def evaluate(self, x) -> np.ndarray:
        x = as_vector(self.domain, x)
        return self.evaluate_many(x[None, :])[0]

    def coeff_abs_sum(self) -> float:
        return float(sum(abs(t[2]) for t in self.terms))

    def scale(self, c) -> "HomPoly":
        if self.domain.field == REAL:
            c = float(c)
        return HomPoly(
            self.degree,
            self.domain,
            self.codomain,
            tuple((out, alpha, coeff * c) for out, alpha, coeff in self.terms),
        )

    def __add__(self, other: "HomPoly") -> "HomPoly":
        if not isinstance(other, HomPoly):
            return NotImplemented
        if (self.degree, self.domain, self.codomain) != (other.degree, other.domain, other.codomain):
            raise PolyError("can only add polynomials of equal degree and spaces")
        return HomPoly(self.degree, self.domain, self.codomain, self.terms + other.terms)

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        return self + other.scale(-1.0)

    def is_zero(self) -> bool:
        return not self.terms


def hom_poly(degree, domain, codomain, terms) -> HomPoly:
    """Build a polynomial, rejecting duplicate (out, alpha) keys."""
    _canonical_terms(degree, domain, codomain, terms, merge=False)
    return HomPoly(degree, domain, codomain, tuple(terms))


def zero_poly(degree: int, domain: SpaceDescriptor, codomain: SpaceDescriptor) -> HomPoly:
    return HomPoly(degree, domain, codomain, ())


def monomial_exponents(dim: int, degree: int) -> list[tuple[int, ...]]:
    """All multi-indices of the given total degree, lexicographic."""
    out = []
    for bars in itertools.combinations(range(degree + dim - 1), dim - 1):
        prev = -1
        alpha = []
        for b in bars + (degree + dim - 1,):
            alpha.append(b - prev - 1)
            prev = b
        out.append(tuple(alpha))
    out.sort()
    return out


@dataclass(frozen=True)
class LinOp:
    """A linear operator on a space, as a dense dim x dim matrix."""

    matrix: np.ndarray
    space: SpaceDescriptor

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=self.space.dtype)
        if m.shape != (self.space.dim, self.space.dim):
            raise PolyError(f"expected {self.space.dim}x{self.space.dim} matrix, got {m.shape}")
        if not np.all(np.isfinite(m.view(np.float64) if self.space.is_complex else m)):
            raise PolyError("operator matrix has non-finite entries")
        object.__setattr__(self, "matrix", m)

    def apply(self, y) -> np.ndarray:
        return self.matrix @ as_vector(self.space, y)

    def apply_many(self, Y: np.ndarray) -> np.ndarray:
        return Y @ self.matrix.T


def adjoint_apply(P: HomPoly, y_star) -> HomPoly:
    """Scalar polynomial y* o P; linear in y* at the coefficient level."""
    y_star = np.asarray(y_star, dtype=P.codomain.dtype)
    if y_star.shape != (P.codomain.dim,):
        raise DimensionMismatch(
            f"dual vector has shape {y_star.shape}, expected ({P.codomain.dim},)"
        )
    scalar = SpaceDescriptor(P.domain.field, 2.0, 1)
    terms = [(0, alpha, y_star[out] * coeff) for out, alpha, coeff in P.terms]
    return HomPoly(P.degree, P.domain, scalar, tuple(terms))


def compose_linear(T: LinOp, P: HomPoly) -> HomPoly:
    """The polynomial x -> T(P(x))."""
    if T.space != P.codomain:
        raise PolyError("operator space does not match the polynomial codomain")
    terms = []
    for out, alpha, coeff in P.terms:
        col = T.matrix[:, out]
        for i in range(T.space.dim):
            if col[i] != 0:
                terms.append((i, alpha, col[i] * coeff))
    return HomPoly(P.degree, P.domain, P.codomain, tuple(terms))


_SUM_KINDS = ("ell_1", "ell_inf", "ell_p")


@dataclass(frozen=True)
class SumRecipe:
    """Blockwise direct sum recipe: which lp glues the summands together."""

    kind: str
    summands: tuple
    p: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _SUM_KINDS:
            raise PolyError(f"unknown sum kind {self.kind!r}")
        if len(self.summands) < 2:
            raise PolyError("a direct sum needs at least two summands")
        if self.kind == "ell_p":
            if self.p is None or not (1.0 < float(self.p) < math.inf):
                raise PolyError("ell_p sums need a finite exponent p in (1, inf)")
        fields = {s.domain.field for s in self.summands}
        if len(fields) != 1:
            raise PolyError("summands must share the scalar field")
        degrees = {s.degree for s in self.summands}
        if len(degrees) != 1:
            raise PolyError("summands must share the degree")

    @property
    def glue_p(self) -> float:
        if self.kind == "ell_1":
            return 1.0
        if self.kind == "ell_inf":
            return math.inf
        return float(self.p)


def _sum_space(recipe: SumRecipe, sides: list[SpaceDescriptor]) -> SpaceDescriptor:
    p = recipe.glue_p
    for s in sides:
        if s.dim > 1 and s.p != p:
            raise PolyError(
                f"an {recipe.kind} sum of lp blocks needs every block of dim > 1 "
                f"to carry p = {p}, got p = {s.p}"
            )
    return SpaceDescriptor(sides[0].field, p, sum(s.dim for s in sides))


def direct_sum(recipe: SumRecipe) -> HomPoly:
    """Blockwise polynomial on the direct sum: Q(x_1, .., x_m) = (Q_i(x_i))_i."""
    doms = [s.domain for s in recipe.summands]
    cods = [s.codomain for s in recipe.summands]
    domain = _sum_space(recipe, doms)
    codomain = _sum_space(recipe, cods)
    terms = []
    in_off = 0
    out_off = 0
    k = recipe.summands[0].degree
    for s in recipe.summands:
        for out, alpha, coeff in s.terms:
            padded = (0,) * in_off + alpha + (0,) * (domain.dim - in_off - s.domain.dim)
            terms.append((out_off + out, padded, coeff))
        in_off += s.domain.dim
        out_off += s.codomain.dim
    return HomPoly(k, domain, codomain, tuple(terms))


def embed_block(R: HomPoly, domain: SpaceDescriptor, codomain: SpaceDescriptor,
                in_offset: int = 0, out_offset: int = 0) -> HomPoly:
    """Embed R as a block of a larger polynomial, zero elsewhere."""
    if in_offset + R.domain.dim > domain.dim or out_offset + R.codomain.dim > codomain.dim:
        raise PolyError("block does not fit into the target spaces")
    terms = []
    for out, alpha, coeff in R.terms:
        padded = (0,) * in_offset + alpha + (0,) * (domain.dim - in_offset - R.domain.dim)
        terms.append((out_offset + out, padded, coeff))
    return HomPoly(R.degree, domain, codomain, tuple(terms))


def poly_to_json(P: HomPoly) -> dict:
    """Canonical JSON form: terms ordered by output index, then alpha."""
    return {
        "field": P.domain.field,
        "degree": P.degree,
        "domain": P.domain.to_json(),
        "codomain": P.codomain.to_json(),
        "terms": [
            {
                "out": out,
                "alpha": list(alpha),
                "re": float(np.real(coeff)),
                "im": float(np.imag(coeff)),
            }
            for out, alpha, coeff in P.terms
        ],
    }


def poly_from_json(data: dict) -> HomPoly:
    try:
        field = data["field"]
        degree = data["degree"]
        domain = SpaceDescriptor.from_json(data["domain"])
        codomain = SpaceDescriptor.from_json(data["codomain"])
        raw = data["terms"]
    except (KeyError, TypeError) as exc:
        raise PolyError(f"malformed polynomial data: {exc}") from exc
    if field not in (REAL, COMPLEX) or field != domain.field:
        raise PolyError("field entry does not match the domain field")
    if not isinstance(degree, int) or isinstance(degree, bool):
        raise PolyError("degree must be an integer")
    terms = []
    for t in raw:
        try:
            coeff = complex(t.get("re", 0.0), t.get("im", 0.0))
            terms.append((t["out"], tuple(t["alpha"]), coeff))
        except (KeyError, TypeError) as exc:
            raise PolyError(f"malformed term {t!r}") from exc
    return hom_poly(degree, domain, codomain, terms)


def dump_poly(P: HomPoly, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(poly_to_json(P), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_poly(path) -> HomPoly:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise PolyError(f"cannot read polynomial file {path}: {exc}") from exc
    return poly_from_json(data)
