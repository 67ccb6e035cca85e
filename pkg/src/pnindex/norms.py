"""Norm families on the plane (and l_p on R^d).

Every norm object is immutable and evaluates on arrays of shape ``(..., d)``.
Smooth variants ship closed-form gradients; the gradient of a norm at ``v``
is the unique functional norming ``v / ||v||``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import ClassVar

import numpy as np
from scipy.optimize import minimize_scalar


class NonSmoothPointError(ValueError):
    """No unique norming functional exists here; use :func:`norming_set`."""


def _points(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    return arr


def _check_nonzero(v: np.ndarray) -> None:
    if np.any(np.all(v == 0.0, axis=-1)):
        raise ValueError("zero vector has no norming functional")


def _lp_raw(v: np.ndarray, p: float) -> np.ndarray:
    # scaled by the largest entry so large p does not overflow
    a = np.abs(v)
    m = a.max(axis=-1)
    safe = np.where(m > 0, m, 1.0)
    s = np.sum((a / safe[..., None]) ** p, axis=-1)
    return np.where(m > 0, safe * s ** (1.0 / p), 0.0)


def _lp_log_grad(v: np.ndarray, p: float, n: np.ndarray) -> np.ndarray:
    """Gradient of log ||v||_p, i.e. sign(v)|v|^(p-1) / ||v||_p^p."""
    r = v / n[..., None]
    return np.sign(r) * np.abs(r) ** (p - 1) / n[..., None]


class Norm:
    """Common interface; concrete families are frozen dataclasses below."""

    variant: ClassVar[str] = ""
    smooth: ClassVar[bool] = True
    dim: int = 2

    @property
    def known_norm(self) -> bool:
        """False when the formula is not guaranteed to satisfy the triangle inequality."""
        return True

    def __call__(self, v) -> np.ndarray:
        return self.eval(v)

    def eval(self, v):
        raise NotImplementedError

    def gradient(self, v):
        raise NotImplementedError

    def params(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_json(self) -> dict:
        return {"variant": self.variant, "params": self.params()}

    def label(self) -> str:
        args = ",".join(f"{k}={v}" for k, v in self.params().items())
        return f"{self.variant}({args})"


@dataclass(frozen=True)
class Lp(Norm):
    variant: ClassVar[str] = "Lp"
    p: float = 2.0
    dim: int = 2

    def __post_init__(self):
        if not self.p > 1 or not math.isfinite(self.p):
            raise ValueError(f"Lp needs finite p > 1, got {self.p}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"Lp needs integer dim >= 2, got {self.dim}")

    def eval(self, v):
        return _lp_raw(_points(v), self.p)

    def gradient(self, v):
        v = _points(v)
        _check_nonzero(v)
        n = _lp_raw(v, self.p)
        return _lp_log_grad(v, self.p, n) * n[..., None]

    def dual_exponent(self) -> float:
        return self.p / (self.p - 1)


@dataclass(frozen=True)
class Polyhedral(Norm):
    """The l_1 or l_inf norm on the plane."""

    variant: ClassVar[str] = "Polyhedral"
    smooth: ClassVar[bool] = False
    kind: str = "Linf"

    def __post_init__(self):
        if self.kind not in ("L1", "Linf"):
            raise ValueError(f"Polyhedral kind must be 'L1' or 'Linf', got {self.kind!r}")

    def eval(self, v):
        a = np.abs(_points(v))
        return a.sum(axis=-1) if self.kind == "L1" else a.max(axis=-1)

    def vertices(self) -> np.ndarray:
        """Extreme points of the unit ball, counter-clockwise."""
        if self.kind == "Linf":
            return np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
        return np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])

    def dual_vertices(self) -> np.ndarray:
        """Extreme points of the dual unit ball."""
        if self.kind == "Linf":
            return np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        return np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])

    def edges(self) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """(start, end, functional) for each edge of the unit sphere.

        The functional is the one norming every interior point of the edge.
        """
        vs = self.vertices()
        out = []
        for i in range(4):
            a, b = vs[i], vs[(i + 1) % 4]
            mid = 0.5 * (a + b)
            out.append((a, b, self._face_functionals(mid)[0]))
        return out

    def _face_functionals(self, v: np.ndarray) -> list[np.ndarray]:
        x = np.asarray(v, dtype=float)
        n = float(self.eval(x))
        tol = 1e-12 * n
        if self.kind == "Linf":
            out = []
            for i in range(2):
                if abs(abs(x[i]) - n) <= tol:
                    f = np.zeros(2)
                    f[i] = math.copysign(1.0, x[i])
                    out.append(f)
            return out
        choices = [
            [math.copysign(1.0, x[i])] if abs(x[i]) > tol else [1.0, -1.0]
            for i in range(2)
        ]
        return [np.array([s, t]) for s in choices[0] for t in choices[1]]

    def gradient(self, v):
        v = _points(v)
        _check_nonzero(v)
        flat = v.reshape(-1, 2)
        out = np.empty_like(flat)
        for j, row in enumerate(flat):
            fs = self._face_functionals(row)
            if len(fs) != 1:
                raise NonSmoothPointError(
                    f"{self.kind} norm is not smooth at {tuple(row)}; use norming_set"
                )
            out[j] = fs[0]
        return out.reshape(v.shape)


@dataclass(frozen=True)
class BetaQuartic(Norm):
    """(x^4 + 2 beta x^2 y^2 + y^4)^(1/4); a norm exactly for beta in [0, 3]."""

    variant: ClassVar[str] = "BetaQuartic"
    beta: float = 1.0

    def __post_init__(self):
        # beta <= -1 lets the quartic vanish or go negative off the origin
        if not self.beta > -1 or not math.isfinite(self.beta):
            raise ValueError(f"BetaQuartic needs beta > -1, got {self.beta}")

    @property
    def known_norm(self) -> bool:
        return 0.0 <= self.beta <= 3.0

    def quartic(self, v):
        v = _points(v)
        x, y = v[..., 0], v[..., 1]
        x2, y2 = x * x, y * y
        return x2 * x2 + 2.0 * self.beta * x2 * y2 + y2 * y2

    def eval(self, v):
        return self.quartic(v) ** 0.25

    def gradient(self, v):
        v = _points(v)
        _check_nonzero(v)
        x, y = v[..., 0], v[..., 1]
        n3 = self.eval(v) ** 3
        gx = (x**3 + self.beta * x * y * y) / n3
        gy = (self.beta * x * x * y + y**3) / n3
        return np.stack([gx, gy], axis=-1)


@dataclass(frozen=True)
class AsymA(Norm):
    """Absolute, normalized, non-symmetric norm with a cubic zero-radius polynomial.

    ||(x,y)|| = (x^2 + r^(1+a) y^2)^(-a/2) (x^2 + r^a y^2)^((1+a)/2),
    r = a/(1+a), and ||(0,0)|| = 0.
    """

    variant: ClassVar[str] = "AsymA"
    a: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise ValueError(f"AsymA needs 0 < a < 1, got {self.a}")

    @property
    def ratio(self) -> float:
        return self.a / (1.0 + self.a)

    @property
    def c_inner(self) -> float:
        """Coefficient of y^2 in the factor raised to -a/2."""
        return self.ratio ** (1.0 + self.a)

    @property
    def c_outer(self) -> float:
        """Coefficient of y^2 in the factor raised to (1+a)/2."""
        return self.ratio**self.a

    def _factors(self, v):
        x2, y2 = v[..., 0] ** 2, v[..., 1] ** 2
        return x2 + self.c_inner * y2, x2 + self.c_outer * y2

    def eval(self, v):
        v = _points(v)
        u, w = self._factors(v)
        zero = u == 0.0
        u = np.where(zero, 1.0, u)
        w = np.where(zero, 1.0, w)
        val = u ** (-self.a / 2) * w ** ((1 + self.a) / 2)
        return np.where(zero, 0.0, val)

    def scale_factor(self, v):
        """The common factor A(x, y, a) of both partial derivatives."""
        v = _points(v)
        u, w = self._factors(v)
        return u ** (-self.a / 2 - 1) * w ** ((1 + self.a) / 2 - 1)

    def gradient(self, v):
        v = _points(v)
        _check_nonzero(v)
        x, y = v[..., 0], v[..., 1]
        a, r = self.a, self.ratio
        big_a = self.scale_factor(v)
        gx = x**3 * big_a
        gy = (r**a * (1 + 2 * a) / (1 + a) * x * x * y + r ** (1 + 2 * a) * y**3) * big_a
        return np.stack([gx, gy], axis=-1)


@dataclass(frozen=True)
class InterpSym(Norm):
    """(x^2 + y^2)^(theta/2) (x^(2m-2) + y^(2m-2))^((1-theta)/(2m-2))."""

    variant: ClassVar[str] = "InterpSym"
    m: int = 3
    theta: float = 0.5

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 3:
            raise ValueError(f"InterpSym needs integer m >= 3, got {self.m}")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"InterpSym needs theta in [0, 1], got {self.theta}")

    def _sums(self, v):
        x, y = v[..., 0], v[..., 1]
        e = 2 * self.m - 2
        return x * x + y * y, x**e + y**e

    def eval(self, v):
        v = _points(v)
        s2, sm = self._sums(v)
        zero = s2 == 0.0
        s2 = np.where(zero, 1.0, s2)
        sm = np.where(zero, 1.0, sm)
        val = s2 ** (self.theta / 2) * sm ** ((1 - self.theta) / (2 * self.m - 2))
        return np.where(zero, 0.0, val)

    def scale_factor(self, v):
        """The common factor B(x, y, m, theta) of both partial derivatives."""
        v = _points(v)
        s2, sm = self._sums(v)
        return s2 ** (self.theta / 2 - 1) * sm ** ((1 - self.theta) / (2 * self.m - 2) - 1)

    def gradient(self, v):
        v = _points(v)
        _check_nonzero(v)
        x, y = v[..., 0], v[..., 1]
        s2, sm = self._sums(v)
        t, j = self.theta, 2 * self.m - 3
        b = self.scale_factor(v)
        gx = (t * x * sm + (1 - t) * x**j * s2) * b
        gy = (t * y * sm + (1 - t) * y**j * s2) * b
        return np.stack([gx, gy], axis=-1)


@dataclass(frozen=True)
class GeomMean(Norm):
    """||v||_{p1}^theta * ||v||_{p0}^(1-theta), a norm for p0, p1 >= 2."""

    variant: ClassVar[str] = "GeomMean"
    p0: float = 2.0
    p1: float = 4.0
    theta: float = 0.5

    def __post_init__(self):
        if not (self.p0 >= 2 and self.p1 >= 2):
            raise ValueError(f"GeomMean needs p0, p1 >= 2, got {self.p0}, {self.p1}")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"GeomMean needs theta in [0, 1], got {self.theta}")

    def eval(self, v):
        v = _points(v)
        return _lp_raw(v, self.p1) ** self.theta * _lp_raw(v, self.p0) ** (1 - self.theta)

    def gradient(self, v):
        v = _points(v)
        _check_nonzero(v)
        n1, n0 = _lp_raw(v, self.p1), _lp_raw(v, self.p0)
        n = n1**self.theta * n0 ** (1 - self.theta)
        logg = self.theta * _lp_log_grad(v, self.p1, n1) + (1 - self.theta) * _lp_log_grad(
            v, self.p0, n0
        )
        return logg * n[..., None]


@dataclass(frozen=True)
class EpsGeomMean(Norm):
    """(x^2 + eps y^2)^(theta/2) (eps x^2 + y^2)^((1-theta)/2).

    Positively homogeneous and smooth, but not a norm for small eps.
    """

    variant: ClassVar[str] = "EpsGeomMean"
    theta: float = 0.5
    eps: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"EpsGeomMean needs theta in (0, 1), got {self.theta}")
        if not self.eps > 0:
            raise ValueError(f"EpsGeomMean needs eps > 0, got {self.eps}")

    @property
    def known_norm(self) -> bool:
        return False

    def _factors(self, v):
        x2, y2 = v[..., 0] ** 2, v[..., 1] ** 2
        return x2 + self.eps * y2, self.eps * x2 + y2

    def eval(self, v):
        v = _points(v)
        u, w = self._factors(v)
        return u ** (self.theta / 2) * w ** ((1 - self.theta) / 2)

    def gradient(self, v):
        v = _points(v)
        _check_nonzero(v)
        x, y = v[..., 0], v[..., 1]
        u, w = self._factors(v)
        n = u ** (self.theta / 2) * w ** ((1 - self.theta) / 2)
        t = self.theta
        gx = n * (t * x / u + (1 - t) * self.eps * x / w)
        gy = n * (t * self.eps * y / u + (1 - t) * y / w)
        return np.stack([gx, gy], axis=-1)


VARIANTS: dict[str, type[Norm]] = {
    cls.variant: cls
    for cls in (Lp, Polyhedral, BetaQuartic, AsymA, InterpSym, GeomMean, EpsGeomMean)
}


def norm_from_json(obj: dict) -> Norm:
    """Inverse of ``Norm.to_json``."""
    try:
        cls = VARIANTS[obj["variant"]]
    except KeyError as exc:
        raise ValueError(f"unknown norm variant: {obj.get('variant')!r}") from exc
    params = dict(obj.get("params", {}))
    allowed = {f.name for f in fields(cls)}
    unknown = set(params) - allowed
    if unknown:
        raise ValueError(f"unknown parameters for {cls.variant}: {sorted(unknown)}")
    if "m" in params:
        params["m"] = int(params["m"])
    if "dim" in params:
        params["dim"] = int(params["dim"])
    return cls(**params)


# -- operations --------------------------------------------------------------


def gradient(norm: Norm, v) -> np.ndarray:
    return norm.gradient(v)


def norming_set(norm: Norm, v) -> list[np.ndarray]:
    """All extreme norming functionals of ``v / ||v||``.

    Smooth norms give a singleton. On a polyhedral norm the norming face is a
    segment at a corner, and its two endpoints are returned.
    """
    v = _points(v)
    if v.ndim != 1:
        raise ValueError("norming_set takes a single vector")
    _check_nonzero(v)
    if isinstance(norm, Polyhedral):
        return norm._face_functionals(v)
    return [norm.gradient(v)]


@dataclass(frozen=True)
class DualPair:
    """A point of the unit sphere together with a functional norming it."""

    point: np.ndarray
    functional: np.ndarray
    pairing: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "pairing", float(np.dot(self.point, self.functional)))

    def to_json(self) -> dict:
        return {
            "point": [float(c) for c in self.point],
            "functional": [float(c) for c in self.functional],
            "pairing": self.pairing,
        }


def dual_pairs(norm: Norm, v) -> list[DualPair]:
    v = _points(v)
    u = v / float(norm.eval(v))
    return [DualPair(u, f) for f in norming_set(norm, u)]


def sphere_point(norm: Norm, angle) -> np.ndarray:
    """Radially rescale (cos t, sin t) onto the unit sphere of ``norm``."""
    t = np.asarray(angle, dtype=float)
    c = np.stack([np.cos(t), np.sin(t)], axis=-1)
    return c / norm.eval(c)[..., None]


def dual_eval(norm: Norm, functional, grid: int = 4096, tol: float = 1e-12) -> float:
    """Dual norm sup{f . x : ||x|| <= 1}.

    Exact for polyhedral norms and l_p in dimension > 2, otherwise a sphere grid
    followed by bounded scalar refinement of the best cells.
    """
    f = _points(functional)
    if isinstance(norm, Polyhedral):
        return float(np.max(norm.vertices() @ f))
    if isinstance(norm, Lp) and norm.dim != 2:
        return float(_lp_raw(f, norm.dual_exponent()))
    if not np.any(f):
        return 0.0

    def pair(t):
        return float(sphere_point(norm, t) @ f)

    ts = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    vals = sphere_point(norm, ts) @ f
    j = int(np.argmax(vals))
    h = 2 * np.pi / grid
    res = minimize_scalar(
        lambda t: -pair(t),
        bounds=(ts[j] - h, ts[j] + h),
        method="bounded",
        options={"xatol": tol},
    )
    return max(float(vals[j]), -float(res.fun))


def classify(norm: Norm, samples: int = 1000, seed: int = 0, tol: float = 1e-12) -> dict:
    """Check the absolute / symmetric / normalized identities on random points."""
    if samples < 100:
        raise ValueError("classify needs at least 100 samples")
    rng = np.random.default_rng(seed)
    v = rng.uniform(-1.0, 1.0, size=(samples, 2))
    base = norm.eval(v)
    scale = np.maximum(np.abs(base), 1e-300)

    def same(w):
        return bool(np.all(np.abs(norm.eval(w) - base) <= tol * scale))

    absolute = all(same(v * s) for s in ([-1, 1], [1, -1], [-1, -1]))
    symmetric = same(v[:, ::-1])
    e = norm.eval(np.eye(2))
    normalized = bool(np.all(np.abs(e - 1.0) <= tol))
    return {"absolute": absolute, "symmetric": symmetric, "normalized": normalized}
