"""Finite-dimensional lp spaces over the real or complex scalars.

Provides the space descriptor (field, exponent p, dimension), lp norms,
the bilinear pairing between a space and its dual, norming functionals
(extreme points of the dual face that attains the norm of a vector),
and deterministic unit-sphere sampling.

The pairing is bilinear, never conjugated: ``pair(b, y) = sum(b_i * y_i)``.
Complex dual vectors therefore carry conjugated phases where alignment
is needed.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "REAL",
    "COMPLEX",
    "SpaceError",
    "DimensionMismatch",
    "SpaceDescriptor",
    "as_vector",
    "norm",
    "norm_batch",
    "normalize",
    "pair",
    "norming_functionals",
    "dual_face_value_batch",
    "dual_face_argmax",
    "dual_face_argmax_batch",
    "sample_sphere",
    "real_embed",
    "real_unembed",
]

REAL = "real"
COMPLEX = "complex"

# Coordinates of a vector whose modulus falls below SUPPORT_RTOL * ||y||_1
# are treated as off the support when building l1 norming faces; the
# pairing defect this introduces stays below the 1e-12 norming tolerance.
_SUPPORT_RTOL = 1e-13
# p = inf: coordinates within ARGMAX_RTOL (relative) of the max modulus
# count as active.
_ARGMAX_RTOL = 1e-12
_HARD_CAP = 2 ** 20


class SpaceError(ValueError):
    """Invalid space, vector, or functional data."""


class DimensionMismatch(SpaceError):
    """Operands live in spaces of different dimensions."""


@dataclass(frozen=True)
class SpaceDescriptor:
    """An lp^n space over R or C.

    ``p`` is an extended real in [1, inf]; ``math.inf`` encodes the sup
    norm. The dual space is the same space with the conjugate exponent.
    """

    field: str
    p: float
    dim: int

    def __post_init__(self) -> None:
        if self.field not in (REAL, COMPLEX):
            raise SpaceError(f"unknown field {self.field!r}")
        p = float(self.p)
        if not (p >= 1.0):
            raise SpaceError(f"p must satisfy p >= 1, got {self.p!r}")
        object.__setattr__(self, "p", p)
        if not isinstance(self.dim, int) or isinstance(self.dim, bool) or self.dim < 1:
            raise SpaceError(f"dim must be a positive integer, got {self.dim!r}")

    @property
    def is_complex(self) -> bool:
        return self.field == COMPLEX

    @property
    def dtype(self):
        return np.complex128 if self.is_complex else np.float64

    @property
    def real_dim(self) -> int:
        """Dimension of the real-coordinate embedding."""
        return self.dim * (2 if self.is_complex else 1)

    @property
    def sphere_dim(self) -> int:
        """Real dimension of the unit sphere as a manifold."""
        return self.real_dim - 1

    @property
    def q(self) -> float:
        """Conjugate exponent, 1/p + 1/q = 1."""
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    def dual(self) -> "SpaceDescriptor":
        return SpaceDescriptor(self.field, self.q, self.dim)

    def to_json(self) -> dict:
        return {
            "field": self.field,
            "p": "inf" if math.isinf(self.p) else self.p,
            "dim": self.dim,
        }

    @staticmethod
    def from_json(data: dict) -> "SpaceDescriptor":
        try:
            field = data["field"]
            p = data["p"]
            dim = data["dim"]
        except (KeyError, TypeError) as exc:
            raise SpaceError(f"malformed space descriptor: {data!r}") from exc
        if isinstance(p, str):
            if p.lower() not in ("inf", "infinity"):
                raise SpaceError(f"unknown exponent {p!r}")
            p = math.inf
        if not isinstance(dim, int) or isinstance(dim, bool):
            raise SpaceError(f"dim must be an integer, got {dim!r}")
        return SpaceDescriptor(field, float(p), dim)


def as_vector(space: SpaceDescriptor, coords) -> np.ndarray:
    """Validate and coerce coordinates into the space's dtype."""
    v = np.asarray(coords, dtype=space.dtype)
    if v.shape != (space.dim,):
        raise DimensionMismatch(
            f"expected {space.dim} coordinates, got shape {v.shape}"
        )
    if not np.all(np.isfinite(v.view(np.float64) if space.is_complex else v)):
        raise SpaceError("vector has non-finite entries")
    return v


def norm(space: SpaceDescriptor, v) -> float:
    """lp norm of ``v``; exactly 0 iff v = 0."""
    v = as_vector(space, v)
    return float(norm_batch(space, v[None, :])[0])


def norm_batch(space: SpaceDescriptor, V: np.ndarray) -> np.ndarray:
    """Row-wise lp norms of an (m, dim) array. No validation."""
    a = np.abs(V)
    if math.isinf(space.p):
        return a.max(axis=1)
    if space.p == 1.0:
        return a.sum(axis=1)
    if space.p == 2.0:
        out = np.sqrt((a * a).sum(axis=1))
    else:
        out = (a ** space.p).sum(axis=1) ** (1.0 / space.p)
    # powers of extreme magnitudes under/overflow; rescale those rows
    if np.any(out == 0.0) or not np.all(np.isfinite(out)):
        peak = a.max(axis=1)
        bad = (~np.isfinite(out)) | ((out == 0.0) & (peak > 0.0))
        if np.any(bad):
            s = peak[bad][:, None]
            out[bad] = s[:, 0] * ((a[bad] / s) ** space.p).sum(axis=1) ** (1.0 / space.p)
    return out


def normalize(space: SpaceDescriptor, v) -> np.ndarray:
    v = as_vector(space, v)
    n = norm(space, v)
    if n == 0.0:
        raise SpaceError("cannot normalize the zero vector")
    return v / n


def pair(b, y) -> complex | float:
    """Bilinear action of a dual vector on a vector: sum(b_i * y_i)."""
    b = np.asarray(b)
    y = np.asarray(y)
    if b.shape != y.shape:
        raise DimensionMismatch(f"pairing shapes differ: {b.shape} vs {y.shape}")
    out = np.sum(b * y)
    if np.iscomplexobj(out):
        return complex(out)
    return float(out)


def _phase_conj(y: np.ndarray, is_complex: bool) -> np.ndarray:
    """Unit scalars u with u * y_i = |y_i|; 1 where y_i = 0."""
    if is_complex:
        a = np.abs(y)
        out = np.ones_like(y)
        nz = a > 0
        out[nz] = np.conj(y[nz]) / a[nz]
        return out
    return np.where(y >= 0, 1.0, -1.0)


def norming_functionals(space: SpaceDescriptor, y, cap: int | None = None) -> list[np.ndarray]:
    """Extreme points of the dual face {b : ||b||_q = 1, pair(b, y) = ||y||}.

    For 1 < p < inf the face is a single functional. For p = 1 the face is
    a product of unit balls over the zero coordinates; its extreme points
    are enumerated one per sign pattern (four phases per coordinate over
    C), truncated at ``cap``. For p = inf the extreme points sit on the
    coordinates of maximal modulus.
    """
    y = as_vector(space, y)
    n = norm(space, y)
    if n == 0.0:
        raise SpaceError("norming functional undefined for the zero vector")
    if cap is None:
        cap = 2 ** space.dim
    if cap > _HARD_CAP:
        raise SpaceError(f"cap {cap} exceeds hard limit {_HARD_CAP}")
    if cap < 1:
        raise SpaceError("cap must be positive")

    a = np.abs(y)
    phases = _phase_conj(y, space.is_complex)

    if math.isinf(space.p):
        active = np.flatnonzero(a >= n * (1.0 - _ARGMAX_RTOL))
        out = []
        for i in active[:cap]:
            b = np.zeros(space.dim, dtype=space.dtype)
            b[i] = phases[i]
            out.append(b)
        return out

    if space.p == 1.0:
        supp = a > n * _SUPPORT_RTOL
        base = np.zeros(space.dim, dtype=space.dtype)
        base[supp] = phases[supp]
        free = np.flatnonzero(~supp)
        if free.size == 0:
            return [base]
        signs = (1.0, 1j, -1.0, -1j) if space.is_complex else (1.0, -1.0)
        out = []
        for pattern in itertools.product(signs, repeat=free.size):
            b = base.copy()
            b[free] = np.asarray(pattern, dtype=space.dtype)
            out.append(b)
            if len(out) >= cap:
                break
        return out

    # 1 < p < inf: the unique norming functional.
    b = np.zeros(space.dim, dtype=space.dtype)
    nz = a > 0
    b[nz] = phases[nz] * a[nz] ** (space.p - 1.0)
    b /= n ** (space.p - 1.0)
    return [b]


def dual_face_value_batch(space: SpaceDescriptor, Y: np.ndarray, V: np.ndarray) -> np.ndarray:
    """sup of |pair(b, v)| over the norming face of each row y.

    The supremum over a face of the dual ball is attained at an extreme
    point, so this equals the maximum over ``norming_functionals``; the
    closed forms below avoid enumerating sign patterns.
    Rows of Y must be nonzero.
    """
    a = np.abs(Y)
    n = norm_batch(space, Y)
    if math.isinf(space.p):
        active = a >= n[:, None] * (1.0 - _ARGMAX_RTOL)
        vals = np.where(active, np.abs(V), -1.0)
        return vals.max(axis=1)
    if space.p == 1.0:
        supp = a > n[:, None] * _SUPPORT_RTOL
        ph = np.where(a > 0, np.conj(Y) / np.where(a > 0, a, 1.0), 1.0) \
            if space.is_complex else np.where(Y >= 0, 1.0, -1.0)
        fixed = np.abs(np.sum(np.where(supp, ph * V, 0.0), axis=1))
        slack = np.sum(np.where(supp, 0.0, np.abs(V)), axis=1)
        return fixed + slack
    b = np.where(a > 0, a ** (space.p - 1.0), 0.0) / n[:, None] ** (space.p - 1.0)
    ph = np.conj(Y) / np.where(a > 0, a, 1.0) if space.is_complex \
        else np.where(Y >= 0, 1.0, -1.0)
    return np.abs(np.sum(np.where(a > 0, b * ph * V, 0.0), axis=1))


def dual_face_argmax_batch(space: SpaceDescriptor, Y: np.ndarray, V: np.ndarray):
    """Row-wise best norming functional of y against v: (values, B).

    Vectorized companion of :func:`dual_face_argmax`; rows of Y must be
    nonzero.
    """
    Y = np.asarray(Y, dtype=space.dtype)
    V = np.asarray(V, dtype=space.dtype)
    m = Y.shape[0]
    a = np.abs(Y)
    n = norm_batch(space, Y)
    rows = np.arange(m)

    if math.isinf(space.p):
        active = a >= n[:, None] * (1.0 - _ARGMAX_RTOL)
        masked = np.where(active, np.abs(V), -1.0)
        j = np.argmax(masked, axis=1)
        B = np.zeros_like(Y)
        if space.is_complex:
            yj = Y[rows, j]
            B[rows, j] = np.conj(yj) / np.abs(yj)
        else:
            B[rows, j] = np.where(Y[rows, j] >= 0, 1.0, -1.0)
        return np.abs(V[rows, j]), B

    if space.p == 1.0:
        supp = a > n[:, None] * _SUPPORT_RTOL
        if space.is_complex:
            PH = np.where(a > 0, np.conj(Y) / np.where(a > 0, a, 1.0), 1.0)
        else:
            PH = np.where(Y >= 0, 1.0, -1.0)
        c = np.sum(np.where(supp, PH * V, 0.0), axis=1)
        ac = np.abs(c)
        if space.is_complex:
            cph = np.where(ac > 0, c / np.where(ac > 0, ac, 1.0), 1.0)
            av = np.abs(V)
            VPH = np.where(av > 0, np.conj(V) / np.where(av > 0, av, 1.0), 1.0)
        else:
            cph = np.where(c >= 0, 1.0, -1.0)
            VPH = np.where(V >= 0, 1.0, -1.0)
        B = np.where(supp, PH, cph[:, None] * VPH)
        vals = ac + np.sum(np.where(supp, 0.0, np.abs(V)), axis=1)
        return vals, B

    B = np.where(a > 0, a ** (space.p - 1.0), 0.0) / n[:, None] ** (space.p - 1.0)
    if space.is_complex:
        PH = np.where(a > 0, np.conj(Y) / np.where(a > 0, a, 1.0), 1.0)
    else:
        PH = np.where(Y >= 0, 1.0, -1.0)
    B = B * PH
    return np.abs(np.sum(B * V, axis=1)), B


def dual_face_argmax(space: SpaceDescriptor, y, v) -> tuple[float, np.ndarray]:
    """Best norming functional of ``y`` against ``v``: (|pair(b, v)|, b)."""
    y = as_vector(space, y)
    v = np.asarray(v, dtype=space.dtype)
    a = np.abs(y)
    n = norm(space, y)
    if n == 0.0:
        raise SpaceError("norming face undefined for the zero vector")
    phases = _phase_conj(y, space.is_complex)

    if math.isinf(space.p):
        active = np.flatnonzero(a >= n * (1.0 - _ARGMAX_RTOL))
        j = active[np.argmax(np.abs(v[active]))]
        b = np.zeros(space.dim, dtype=space.dtype)
        b[j] = phases[j]
        return float(np.abs(v[j])), b

    if space.p == 1.0:
        supp = a > n * _SUPPORT_RTOL
        b = np.zeros(space.dim, dtype=space.dtype)
        b[supp] = phases[supp]
        c = np.sum(b[supp] * v[supp])
        free = np.flatnonzero(~supp)
        if free.size:
            cph = c / abs(c) if abs(c) > 0 else 1.0
            vph = _phase_conj(v[free], space.is_complex)
            if space.is_complex:
                b[free] = cph * vph
            else:
                b[free] = (1.0 if cph >= 0 else -1.0) * vph
        val = abs(c) + np.sum(np.abs(v[free])) if free.size else abs(c)
        return float(val), b

    b = np.zeros(space.dim, dtype=space.dtype)
    nz = a > 0
    b[nz] = phases[nz] * a[nz] ** (space.p - 1.0)
    b /= n ** (space.p - 1.0)
    return float(abs(np.sum(b * v))), b


def _deterministic_points(space: SpaceDescriptor) -> list[np.ndarray]:
    """Extreme-point candidates mixed into sphere samples for p in {1, inf}."""
    pts: list[np.ndarray] = []
    if space.p != 1.0 and not math.isinf(space.p):
        return pts
    eye = np.eye(space.dim, dtype=space.dtype)
    for i in range(space.dim):
        pts.append(eye[i].copy())
        pts.append(-eye[i])
        if space.is_complex:
            pts.append(1j * eye[i])
            pts.append(-1j * eye[i])
    # sign-pattern vertices of the cube / cross-polytope face centers
    if space.dim <= 4:
        for pattern in itertools.product((1.0, -1.0), repeat=space.dim):
            v = np.asarray(pattern, dtype=space.dtype)
            pts.append(v / norm_batch(space, v[None, :])[0])
    return pts


_SAMPLE_CACHE: dict = {}


def sample_sphere(space: SpaceDescriptor, count: int, seed: int) -> list[np.ndarray]:
    """Deterministic unit-sphere samples.

    Gaussian directions normalized in lp, preceded (for p in {1, inf}) by
    the signed unit coordinates and normalized sign-pattern vertices so
    that extreme points appear with positive frequency.
    """
    if count < 1:
        raise SpaceError("count must be >= 1")
    key = (space, count, seed)
    cached = _SAMPLE_CACHE.get(key)
    if cached is not None:
        return [v.copy() for v in cached]
    rng = np.random.default_rng(seed)
    out = _deterministic_points(space)[:count]
    while len(out) < count:
        g = rng.standard_normal(space.real_dim)
        v = g.view(np.complex128) if space.is_complex else g
        n = norm_batch(space, v[None, :])[0]
        if n < 1e-12:
            continue
        out.append((v / n).astype(space.dtype))
    if len(_SAMPLE_CACHE) < 256:
        _SAMPLE_CACHE[key] = [v.copy() for v in out]
    return out


def real_embed(space: SpaceDescriptor, x: np.ndarray) -> np.ndarray:
    """View a point as real coordinates (re/im interleaved over C)."""
    x = np.ascontiguousarray(x, dtype=space.dtype)
    if space.is_complex:
        return x.view(np.float64).copy()
    return x.astype(np.float64, copy=True)


def real_unembed(space: SpaceDescriptor, u: np.ndarray) -> np.ndarray:
    """Inverse of :func:`real_embed`; accepts (m, real_dim) batches."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    if space.is_complex:
        return u.view(np.complex128)
    return u
