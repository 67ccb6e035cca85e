"""Numerical range samples, numerical radius and zero-radius certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .homopoly import (
    VectorHomoPoly,
    _max_abs_on_unit_interval,
    eval_scalar,
    eval_vector,
    q_poly,
)
from .norms import DualPair, Norm, Polyhedral, sphere_point

COARSE_GRID = 4096
FINE_GRID = 65536


@dataclass(frozen=True)
class RadiusEstimate:
    value: float
    witness: DualPair
    witness_value: float
    witness_angle: float
    grid: int
    refined_tol: float

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "witness_angle": self.witness_angle,
            "witness_value": self.witness_value,
            "point": [float(c) for c in self.witness.point],
            "functional": [float(c) for c in self.witness.functional],
            "grid": self.grid,
            "tolerance": self.refined_tol,
        }


def pairings(P: VectorHomoPoly, norm: Norm, angles) -> np.ndarray:
    """x*(P(x)) at the sphere points of the given angles, for a smooth norm."""
    x = sphere_point(norm, angles)
    return np.sum(norm.gradient(x) * eval_vector(P, x), axis=-1)


def _vertex_pairings(P: VectorHomoPoly, norm: Polyhedral) -> list[float]:
    out = []
    for v in norm.vertices():
        pv = eval_vector(P, v)
        out.extend(float(f @ pv) for f in norm._face_functionals(v))
    return out


def range_samples(P: VectorHomoPoly, norm: Norm, n: int) -> list[float]:
    """Values x*(P(x)) at ``n`` equispaced angles.

    For polyhedral norms every extreme functional of each norming face is
    used, and the pairings at the corners are appended.
    """
    if n < 16:
        raise ValueError("range_samples needs n >= 16")
    ts = 2 * np.pi * np.arange(n) / n
    if not isinstance(norm, Polyhedral):
        return [float(v) for v in pairings(P, norm, ts)]
    out = []
    pts = sphere_point(norm, ts)
    vals = eval_vector(P, pts)
    for x, px in zip(pts, vals):
        out.extend(float(f @ px) for f in norm._face_functionals(x))
    return out + _vertex_pairings(P, norm)


def _polyhedral_radius(P: VectorHomoPoly, norm: Polyhedral) -> RadiusEstimate:
    # the pairing is affine in the functional across a face, so the edge
    # functionals (which are the corner faces' extreme points) suffice
    best = (-1.0, None, None)
    for a, b, f in norm.edges():
        c = f[0] * P.p1.on_segment(a, b) + f[1] * P.p2.on_segment(a, b)
        val, s = _max_abs_on_unit_interval(c)
        if val > best[0]:
            best = (val, a + s * (b - a), f)
    val, x, f = best
    pair = DualPair(x, f)
    pv = float(f @ eval_vector(P, x))
    return RadiusEstimate(val, pair, pv, math.atan2(x[1], x[0]), 0, 0.0)


def radius(
    P: VectorHomoPoly, norm: Norm, tol: float = 1e-12, grid: int = COARSE_GRID
) -> RadiusEstimate:
    """Numerical radius v(P) = sup |x*(P(x))| over norming pairs.

    |x*(P(x))| is even in x, so the grid covers the half circle only. The best
    cells are refined in angle to ``tol``; polyhedral norms are exact.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(norm, Polyhedral):
        return _polyhedral_radius(P, norm)
    grid = max(int(grid), COARSE_GRID)
    ts = np.linspace(0.0, np.pi, grid, endpoint=False)
    vals = np.abs(pairings(P, norm, ts))
    h = ts[1] - ts[0]
    # lowest angle wins ties
    order = np.argsort(-vals, kind="stable")[:4]
    best_t, best_v = float(ts[order[0]]), float(vals[order[0]])
    if best_v > 0.0:
        for j in order:
            res = minimize_scalar(
                lambda t: -abs(float(pairings(P, norm, t))),
                bounds=(ts[j] - h, ts[j] + h),
                method="bounded",
                options={"xatol": tol},
            )
            if -res.fun > best_v:
                best_t, best_v = float(res.x), float(-res.fun)
    x = sphere_point(norm, best_t)
    f = norm.gradient(x)
    pv = float(f @ eval_vector(P, x))
    return RadiusEstimate(best_v, DualPair(x, f), pv, best_t, grid, tol)


def verify_zero(P: VectorHomoPoly, norm: Norm, tol: float) -> tuple[bool, float]:
    """Certify v(P) <= tol.

    Every grid value is an attained pairing, so a coarse value above ``tol``
    already refutes; a coarse pass is confirmed on the fine grid.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    coarse = radius(P, norm, grid=COARSE_GRID)
    if coarse.value > tol:
        return False, coarse.value
    fine = radius(P, norm, grid=FINE_GRID)
    found = max(coarse.value, fine.value)
    return found <= tol, found


def thm_norming(P: VectorHomoPoly, v, norm: Norm) -> np.ndarray:
    """Norming functional of ``v`` read off a zero-radius map P.

    x* = -P2(v) ||v|| / Q(v),  y* = P1(v) ||v|| / Q(v),  Q = y P1 - x P2.
    """
    v = np.asarray(v, dtype=float)
    q = eval_scalar(q_poly(P), v)
    if np.any(q == 0.0):
        raise ValueError("Q vanishes at this point; P cannot have radius zero here")
    pv = eval_vector(P, v)
    scale = norm.eval(v) / q
    return np.stack([-pv[..., 1] * scale, pv[..., 0] * scale], axis=-1)


def interval_gap_check(samples) -> tuple[bool, float, float]:
    """Compare gaps of the sorted samples with the largest jump between neighbours.

    ``samples`` are taken in angular order around the whole sphere. A closed
    path covers its range with no gap larger than its largest step, so a
    violation points at an under-resolved grid.
    """
    s = np.asarray(samples, dtype=float)
    step = float(np.max(np.abs(np.diff(np.append(s, s[0])))))
    srt = np.sort(s)
    gap = float(np.max(np.diff(srt))) if len(s) > 1 else 0.0
    return gap <= step * (1 + 1e-12) + 1e-15, gap, step
