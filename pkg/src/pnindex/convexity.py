"""Convexity checks for candidate norm formulas on the plane.

Verdicts are "certified on grid": sampling can confirm a known
classification or produce a reproducible counterexample, never prove
convexity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .norms import AsymA, BetaQuartic, EpsGeomMean, GeomMean, Lp, Norm, Polyhedral, sphere_point

CERTIFIED = "certified-convex-on-grid"
VIOLATION = "violation-found"
WITNESS_MARGIN = 1e-10
HESSIAN_FLOOR = -1e-7


@dataclass(frozen=True)
class Witness:
    """f(lam u + (1 - lam) v) exceeds lam f(u) + (1 - lam) f(v) by ``margin``."""

    u: tuple[float, float]
    v: tuple[float, float]
    lam: float
    margin: float

    def to_json(self) -> dict:
        return {
            "u": [float(c) for c in self.u],
            "v": [float(c) for c in self.v],
            "lambda": float(self.lam),
            "margin": self.margin,
        }


def convexity_excess(f, u, v, lam: float) -> float:
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    return float(f(lam * u + (1 - lam) * v) - lam * f(u) - (1 - lam) * f(v))


def _witness(f, u, v, lam) -> Witness:
    return Witness(tuple(map(float, u)), tuple(map(float, v)), float(lam), convexity_excess(f, u, v, lam))


@dataclass(frozen=True)
class ConvexityReport:
    verdict: str
    witness: Witness | None
    grid: int
    min_hessian_eig: float = math.nan

    @property
    def convex(self) -> bool:
        return self.verdict == CERTIFIED

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": self.witness.to_json() if self.witness else None,
            "grid": self.grid,
            "min_hessian_eig": None if math.isnan(self.min_hessian_eig) else self.min_hessian_eig,
        }


# -- sphere midpoint test -----------------------------------------------------


def cone_index(angle) -> np.ndarray:
    """Which of the eight cones {j pi/4 <= angle < (j+1) pi/4} holds each direction."""
    t = np.mod(np.asarray(angle, dtype=float), 2 * np.pi)
    return np.minimum((t // (np.pi / 4)).astype(int), 7)


def midpoint_test(norm: Norm, pairs: int = 4000, seed: int = 0) -> ConvexityReport:
    """Look for convexity violations between points of the unit sphere.

    Pairs are drawn inside each of the eight cones cut by the axes and the
    diagonals, between a point and its mirror images, and across the whole
    sphere. The largest excess above ``WITNESS_MARGIN`` is reported.
    """
    if pairs < 1000:
        raise ValueError("midpoint_test needs at least 1000 pairs")
    rng = np.random.default_rng(seed)
    per = pairs // 8
    angs_u, angs_v = [], []
    for j in range(8):
        lo = j * np.pi / 4
        angs_u.append(rng.uniform(lo, lo + np.pi / 4, per))
        angs_v.append(rng.uniform(lo, lo + np.pi / 4, per))
    angs_u.append(rng.uniform(0, 2 * np.pi, pairs))
    angs_v.append(rng.uniform(0, 2 * np.pi, pairs))
    tu, tv = np.concatenate(angs_u), np.concatenate(angs_v)
    u, v = sphere_point(norm, tu), sphere_point(norm, tv)
    lam = rng.uniform(0, 1, len(tu))
    # mirror pairs with lam = 1/2
    base = sphere_point(norm, rng.uniform(0, 2 * np.pi, pairs))
    mirrors = [base * [1, -1], base * [-1, 1], base[:, ::-1], -base[:, ::-1]]
    for m in mirrors:
        u = np.vstack([u, base])
        v = np.vstack([v, m / norm.eval(m)[:, None]])
        lam = np.r_[lam, np.full(pairs, 0.5)]
    excess = norm.eval(lam[:, None] * u + (1 - lam[:, None]) * v) - lam * norm.eval(u) - (
        1 - lam
    ) * norm.eval(v)
    j = int(np.argmax(excess))
    total = len(lam)
    if excess[j] > WITNESS_MARGIN:
        w = _witness(norm.eval, u[j], v[j], lam[j])
        if w.margin > WITNESS_MARGIN:
            return ConvexityReport(VIOLATION, w, total)
    return ConvexityReport(CERTIFIED, None, total)


# -- Hessian grid -------------------------------------------------------------


def _hessian_fd(f, pts: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ex, ey = np.array([h, 0.0]), np.array([0.0, h])
    f0 = f(pts)
    fxx = (f(pts + ex) - 2 * f0 + f(pts - ex)) / h**2
    fyy = (f(pts + ey) - 2 * f0 + f(pts - ey)) / h**2
    fxy = (f(pts + ex + ey) - f(pts + ex - ey) - f(pts - ex + ey) + f(pts - ex - ey)) / (4 * h**2)
    return fxx, fxy, fyy


def hessian(norm: Norm, pts, step: float = 1e-3) -> np.ndarray:
    """Central-difference Hessian with one Richardson extrapolation, shape (..., 2, 2)."""
    pts = np.asarray(pts, dtype=float)
    coarse = _hessian_fd(norm.eval, pts, step)
    fine = _hessian_fd(norm.eval, pts, step / 2)
    fxx, fxy, fyy = ((4 * b - a) / 3 for a, b in zip(coarse, fine))
    return np.stack([np.stack([fxx, fxy], -1), np.stack([fxy, fyy], -1)], -2)


def _min_eig(hs: np.ndarray) -> np.ndarray:
    a, b, c = hs[..., 0, 0], hs[..., 0, 1], hs[..., 1, 1]
    return 0.5 * (a + c) - np.hypot(0.5 * (a - c), b)


def hessian_grid(norm: Norm, grid: int = 256, step: float = 1e-3) -> ConvexityReport:
    """Smallest Hessian eigenvalue over a polar grid of the annulus 1/2 <= |v| <= 2.

    Angles are offset by half a cell so no point sits on an axis; for norms
    that are only finitely smooth across the axes (non-even l_p exponents),
    points within a few steps of an axis are dropped.
    """
    if isinstance(norm, Polyhedral):
        raise ValueError("hessian_grid needs a smooth norm")
    ts = (np.arange(grid) + 0.5) * 2 * np.pi / grid
    if isinstance(norm, AsymA):
        # 8x denser near the x-axis, |y| <= 0.05 on the unit circle
        w = math.asin(0.05)
        fine = (np.arange(8 * grid) + 0.5) * 2 * np.pi / (8 * grid)
        near = np.minimum(np.abs(np.sin(fine)), 1.0) <= math.sin(w)
        ts = np.sort(np.r_[ts, fine[near]])
    rs = np.geomspace(0.5, 2.0, max(4, grid // 32))
    pts = (rs[:, None, None] * np.stack([np.cos(ts), np.sin(ts)], -1)[None]).reshape(-1, 2)
    if _axis_sensitive(norm):
        keep = np.min(np.abs(pts), axis=1) > 4 * step
        pts = pts[keep]
    eig = _min_eig(hessian(norm, pts, step))
    j = int(np.argmin(eig))
    m = float(eig[j])
    if m >= HESSIAN_FLOOR:
        return ConvexityReport(CERTIFIED, None, len(pts), m)
    # turn the negative curvature into an explicit chord witness
    vals, vecs = np.linalg.eigh(hessian(norm, pts[j], step))
    d = vecs[:, 0]
    w = None
    for scale in (1e-1, 3e-2, 1e-2, 3e-3):
        cand = _witness(norm.eval, pts[j] + scale * d, pts[j] - scale * d, 0.5)
        if cand.margin > WITNESS_MARGIN:
            w = cand
            break
    return ConvexityReport(VIOLATION, w, len(pts), m)


def _axis_sensitive(norm: Norm) -> bool:
    def odd_power(p):
        return not (float(p).is_integer() and int(p) % 2 == 0)

    if isinstance(norm, Lp):
        return odd_power(norm.p)
    if isinstance(norm, GeomMean):
        return odd_power(norm.p0) or odd_power(norm.p1)
    return False


# -- log-convexity profiles ---------------------------------------------------


def _second_derivative(fn, t: np.ndarray, h: float) -> np.ndarray:
    return (fn(t + h) - 2 * fn(t) + fn(t - h)) / h**2


def _first_derivative(fn, t: np.ndarray, h: float) -> np.ndarray:
    return (fn(t + h) - fn(t - h)) / (2 * h)


@dataclass(frozen=True)
class LogProfile:
    t: np.ndarray
    phi2: np.ndarray  # closed-form phi''
    curvature: np.ndarray  # closed-form phi'' + phi'^2
    fd_error: float  # max deviation of the closed forms from finite differences

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(a), float(b), float(c)) for a, b, c in zip(self.t, self.phi2, self.curvature)]


def _lp_log_derivs(t: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
    """phi' and phi'' of t -> log ||(t, 1)||_p on t >= 0."""
    tp = t**p
    d1 = t ** (p - 1) / (1 + tp)
    d2 = t ** (p - 2) * (p - 1 - tp) / (1 + tp) ** 2
    return d1, d2


def log_convexity_profile(norm: Norm, t_grid) -> LogProfile:
    """phi = log ||(t, 1)||: closed-form phi'' and phi'' + phi'^2 with a finite-difference cross-check.

    ``GeomMean`` uses t in [0, 1]; ``AsymA`` any real t. Exponents that are not
    even integers make phi only finitely smooth at t = 0, and the central
    difference there is accurate only to about h**(p - 2).
    """
    t = np.asarray(t_grid, dtype=float)
    if isinstance(norm, GeomMean):
        if np.any(t < 0) or np.any(t > 1):
            raise ValueError("GeomMean profile is defined on t in [0, 1]")
        d1a, d2a = _lp_log_derivs(t, norm.p1)
        d1b, d2b = _lp_log_derivs(t, norm.p0)
        th = norm.theta
        d1 = th * d1a + (1 - th) * d1b
        d2 = th * d2a + (1 - th) * d2b
    elif isinstance(norm, AsymA):
        c0, c1 = norm.c_outer, norm.c_inner
        den = (c0 + t * t) * (c1 + t * t)
        d1 = t**3 / den
        d2 = (3 * t**2 * c0 * c1 + t**4 * c0 + t**4 * c1 - t**6) / den**2
    else:
        raise ValueError("log profiles exist for GeomMean and AsymA only")

    def phi(s):
        s = np.asarray(s, dtype=float)
        return np.log(norm.eval(np.stack([s, np.ones_like(s)], -1)))

    h = 1e-4
    fd2 = _second_derivative(phi, t, h)
    fd1 = _first_derivative(phi, t, h)
    err = float(max(np.max(np.abs(fd2 - d2)), np.max(np.abs(fd1 - d1))))
    return LogProfile(t, d2, d2 + d1 * d1, err)


# -- the quartic family ----------------------------------------------------------


@dataclass(frozen=True)
class BetaVerdict:
    beta: float
    is_norm: bool
    route: str
    g: float | None = None
    identity_error: float = 0.0
    witness: Witness | None = None

    def to_json(self) -> dict:
        return {
            "beta": self.beta,
            "is_norm": self.is_norm,
            "route": self.route,
            "g": self.g,
            "identity_error": self.identity_error,
            "witness": self.witness.to_json() if self.witness else None,
        }


def quartic_value(beta: float, v) -> np.ndarray:
    """(x^4 + 2 beta x^2 y^2 + y^4)^(1/4) for any real beta, where the quartic is >= 0."""
    v = np.asarray(v, dtype=float)
    x2, y2 = v[..., 0] ** 2, v[..., 1] ** 2
    return (x2 * x2 + 2 * beta * x2 * y2 + y2 * y2) ** 0.25


def _sample_points(n: int = 512, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-2, 2, size=(n, 2))


def _decomposition_error(beta: float) -> float:
    """Max gap between the quartic and the l_4 norm of (b^(1/4)|v|_2, (1-b)^(1/4)|v|_4)."""
    v = _sample_points()
    e2 = Lp(2).eval(v)
    e4 = Lp(4).eval(v)
    rhs = Lp(4).eval(np.stack([beta**0.25 * e2, (1 - beta) ** 0.25 * e4], -1))
    return float(np.max(np.abs(quartic_value(beta, v) - rhs)))


def _rotation_scale(beta: float) -> float:
    return (2.0 + 2.0 * beta) ** 0.25


def _rotate(beta: float, uv: np.ndarray) -> np.ndarray:
    """(u, v) -> ((u + v), (u - v)) / (2 + 2 beta)^(1/4)."""
    uv = np.asarray(uv, dtype=float)
    s = _rotation_scale(beta)
    return np.stack([uv[..., 0] + uv[..., 1], uv[..., 0] - uv[..., 1]], -1) / s


def reflected_beta(beta: float) -> float:
    """g(beta) = (3 - beta) / (1 + beta)."""
    return (3.0 - beta) / (1.0 + beta)


def _substitution_error(beta: float) -> float:
    uv = _sample_points()
    g = reflected_beta(beta)
    return float(np.max(np.abs(quartic_value(beta, _rotate(beta, uv)) - quartic_value(g, uv))))


def _negative_witness(beta: float) -> Witness:
    delta = min(1.0, math.sqrt(-2.0 * beta) / 2.0)
    # for beta < -1 the fixed delta can make the quartic negative; shrink it
    while 1 + 2 * beta * delta**2 + delta**4 <= 0:
        delta /= 2
    r = (1 + 2 * beta * delta**2 + delta**4) ** -0.25
    u, v = np.array([r, r * delta]), np.array([r, -r * delta])
    return _witness(lambda z: quartic_value(beta, z), u, v, 0.5)


def beta_classify(beta: float) -> BetaVerdict:
    """Decide whether the quartic formula is a norm, with an explicit reason.

    [0, 1]: it is an l_4 norm of the vector of l_2 and l_4 norms.
    (1, 3]: a rotation maps it to parameter g(beta) in [0, 1).
    < 0: two points of the unit sphere whose midpoint lies outside the ball.
    > 3: the same witness for g(beta) < 0, mapped back through the rotation.
    """
    beta = float(beta)
    if 0.0 <= beta <= 1.0:
        err = _decomposition_error(beta)
        return BetaVerdict(beta, err < 1e-12, "decomposition", identity_error=err)
    if 1.0 < beta <= 3.0:
        g = reflected_beta(beta)
        err = max(_substitution_error(beta), _decomposition_error(g))
        return BetaVerdict(beta, err < 1e-12, "rotation+decomposition", g, err)
    if beta < 0.0:
        return BetaVerdict(beta, False, "midpoint", witness=_negative_witness(beta))
    g = reflected_beta(beta)
    base = _negative_witness(g)
    u, v = _rotate(beta, base.u), _rotate(beta, base.v)
    w = _witness(lambda z: quartic_value(beta, z), u, v, 0.5)
    return BetaVerdict(beta, False, "rotation+midpoint", g, _substitution_error(beta), w)


# -- the eps counterexample -----------------------------------------------------


@dataclass(frozen=True)
class EpsWitness:
    eps: float
    n11: float
    n10: float
    n01: float

    @property
    def margin(self) -> float:
        return self.n11 - self.n10 - self.n01

    def to_json(self) -> dict:
        return {"eps": self.eps, "n(1,1)": self.n11, "n(1,0)": self.n10, "n(0,1)": self.n01,
                "margin": self.margin}


def eps_counterexample(theta: float, eps_grid, margin: float = 1e-12) -> EpsWitness | None:
    """First eps in a decreasing grid with n(1,1) > n(1,0) + n(0,1)."""
    grid = [float(e) for e in eps_grid]
    if any(e <= 0 for e in grid) or any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("eps_grid must be positive and strictly decreasing")
    for eps in grid:
        n = EpsGeomMean(theta, eps)
        w = EpsWitness(eps, float(n.eval([1.0, 1.0])), float(n.eval([1.0, 0.0])), float(n.eval([0.0, 1.0])))
        if w.margin > margin:
            return w
    return None
