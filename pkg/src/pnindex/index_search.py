"""Upper estimates of the polynomial numerical index n^(k)(X).

The objective v(P)/||P|| is scale invariant, so it is minimized over raw
coefficient vectors. On a fixed sample of norming pairs both the pairings and
the values P(x) are linear in the coefficients, which makes each objective
evaluation two small matrix-vector products.

Each start screens random candidates, runs Nelder-Mead, then polishes with
linear programs: ||P|| is convex in the coefficients, so with a subgradient
``s`` at the current point, ``s . c >= 1`` forces ``||P_c|| >= 1`` and
minimizing max |pairing| under that constraint never increases the ratio.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize

from .homopoly import VectorHomoPoly, sup_norm
from .norms import Norm, Polyhedral, norming_set, sphere_point
from .numrange import radius, verify_zero

ZERO_THRESHOLD = 1e-6
MODEL_GRID = 512


@dataclass(frozen=True)
class Budget:
    starts: int = 64
    iterations: int = 300
    restarts: int = 1
    lp_steps: int = 30

    def __post_init__(self):
        if self.starts < 1 or self.iterations < 1 or self.restarts < 0 or self.lp_steps < 0:
            raise ValueError("budget must be positive")


@dataclass(frozen=True)
class IndexEstimate:
    k: int
    value: float
    best: VectorHomoPoly
    starts: int
    evals: int
    seed: int
    tol: float = 1e-12
    # wall time; kept out of JSON so outputs stay reproducible
    elapsed: float = field(default=0.0, compare=False)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "value": self.value,
            # the optimizer only ever exhibits maps, so this bounds the index from above
            "bound": "upper",
            "best": self.best.to_json(),
            "starts": self.starts,
            "evals": self.evals,
            "seed": self.seed,
        }


class PairingModel:
    """Norming pairs sampled once per (norm, k).

    Rows of ``pair_matrix`` map a coefficient vector to the pairings; the
    ``basis`` matrix maps component coefficients to P(x) at the same points.
    """

    def __init__(self, norm: Norm, k: int, grid: int = MODEL_GRID):
        self.norm, self.k = norm, k
        if isinstance(norm, Polyhedral):
            pts, funcs = [], []
            per_edge = max(grid // 4, 2)
            s = np.linspace(0.0, 1.0, per_edge)
            for a, b, f in norm.edges():
                seg = a + s[:, None] * (b - a)
                pts.append(seg)
                funcs.append(np.tile(f, (per_edge, 1)))
            x, fx = np.concatenate(pts), np.concatenate(funcs)
        else:
            # |pairing| and ||P(x)|| are even in x
            ts = np.linspace(0.0, np.pi, grid, endpoint=False)
            x = sphere_point(norm, ts)
            fx = norm.gradient(x)
        i = np.arange(k + 1)
        self.points = x
        self.basis = x[:, :1] ** (k - i) * x[:, 1:] ** i
        self.pair_matrix = np.hstack([fx[:, :1] * self.basis, fx[:, 1:] * self.basis])

    def image(self, c: np.ndarray) -> np.ndarray:
        k1 = self.k + 1
        return np.stack([self.basis @ c[:k1], self.basis @ c[k1:]], axis=-1)

    def ratio(self, c: np.ndarray) -> float:
        v = np.max(np.abs(self.pair_matrix @ c))
        n = np.max(self.norm.eval(self.image(c)))
        return float(v / n) if n > 0 else np.inf

    def norm_subgradient(self, c: np.ndarray) -> np.ndarray:
        """A subgradient of the sampled ||P_c|| with respect to c."""
        img = self.image(c)
        j = int(np.argmax(self.norm.eval(img)))
        z = img[j]
        if isinstance(self.norm, Polyhedral):
            g = norming_set(self.norm, z)[0]
        else:
            g = self.norm.gradient(z)
        return np.concatenate([g[0] * self.basis[j], g[1] * self.basis[j]])

    def lp_step(self, c: np.ndarray) -> np.ndarray | None:
        """Minimize max |pairing| subject to s . c = 1; None if the solver fails."""
        n, dim = self.pair_matrix.shape
        s = self.norm_subgradient(c)
        ones = np.ones((n, 1))
        a_ub = np.vstack([np.hstack([self.pair_matrix, -ones]), np.hstack([-self.pair_matrix, -ones])])
        res = linprog(
            np.r_[np.zeros(dim), 1.0],
            A_ub=a_ub,
            b_ub=np.zeros(2 * n),
            A_eq=np.r_[s, 0.0][None, :],
            b_eq=[1.0],
            bounds=[(None, None)] * dim + [(0, None)],
            method="highs",
        )
        return res.x[:dim] if res.status == 0 else None


def objective(P: VectorHomoPoly, norm: Norm, tol: float = 1e-12, grid: int = 4096) -> float:
    """v(P) / ||P||, with both quantities refined to ``tol``."""
    n = sup_norm(P, norm, tol=tol, grid=grid)
    if n == 0.0:
        raise ValueError("zero polynomial")
    return radius(P, norm, tol=tol, grid=grid).value / n


def _unit(c: np.ndarray) -> np.ndarray:
    return c / np.linalg.norm(c)


def _run_start(model: PairingModel, rng_seed, budget: Budget) -> tuple[float, np.ndarray, int]:
    rng = np.random.default_rng(rng_seed)
    dim = 2 * (model.k + 1)
    # screen 4(k+1) random candidates, descend from the best
    cands = rng.standard_normal((4 * (model.k + 1), dim))
    scores = [model.ratio(c) for c in cands]
    x = _unit(cands[int(np.argmin(scores))])
    evals = len(cands)
    fval = min(scores)
    for _ in range(budget.restarts + 1):
        res = minimize(
            lambda c: model.ratio(_unit(c)) if np.any(c) else np.inf,
            x,
            method="Nelder-Mead",
            options={
                "maxiter": budget.iterations,
                "maxfev": 2 * budget.iterations,
                "xatol": 1e-13,
                "fatol": 1e-15,
                "adaptive": True,
            },
        )
        evals += res.nfev
        improved = res.fun < fval * (1 - 1e-9)
        if res.fun <= fval:
            x, fval = _unit(res.x), float(res.fun)
        if not improved:
            break
    for _ in range(budget.lp_steps):
        c = model.lp_step(x)
        if c is None or not np.any(c):
            break
        evals += 1
        f = model.ratio(_unit(c))
        if not f < fval:
            break
        stalled = f > fval * (1 - 1e-6)
        x, fval = _unit(c), f
        if fval == 0.0 or stalled:
            break
    return fval, x, evals


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("PNINDEX_THREADS", "1")))
    except ValueError:
        return 1


def estimate_index(
    norm: Norm,
    k: int,
    budget: Budget | None = None,
    seed: int = 0,
    tol: float = 1e-12,
) -> IndexEstimate:
    """Best v(P)/||P|| found over degree-k maps: an upper bound for n^(k)(X)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    budget = budget or Budget()
    t0 = time.perf_counter()
    model = PairingModel(norm, k)
    seeds = np.random.SeedSequence(seed).spawn(budget.starts)
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        results = list(pool.map(lambda s: _run_start(model, s, budget), seeds))
    # lowest start index wins ties
    j = min(range(len(results)), key=lambda i: (results[i][0], i))
    evals = sum(r[2] for r in results)
    best = VectorHomoPoly.from_vector(k, _unit(results[j][1]))
    value = objective(best, norm, tol=tol)
    return IndexEstimate(k, value, best, budget.starts, evals, seed, tol, time.perf_counter() - t0)


@dataclass
class ZeroDegreeResult:
    k0: int | None
    per_k: list[IndexEstimate] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"k0": self.k0, "per_k": [e.to_json() for e in self.per_k]}


def min_zero_degree(
    norm: Norm, kmax: int, budget: Budget | None = None, seed: int = 0
) -> ZeroDegreeResult:
    """Smallest k <= kmax whose best map certifies v(P) = 0 (up to the zero threshold)."""
    if kmax > 9:
        raise ValueError("kmax above 9 is not supported")
    out = ZeroDegreeResult(None)
    for k in range(1, kmax + 1):
        est = estimate_index(norm, k, budget, seed)
        out.per_k.append(est)
        if est.value <= ZERO_THRESHOLD:
            P = est.best * (1.0 / sup_norm(est.best, norm))
            if verify_zero(P, norm, ZERO_THRESHOLD)[0]:
                out.k0 = k
                break
    return out


def uniqueness_check(canonical: VectorHomoPoly, found: VectorHomoPoly) -> float:
    """|cosine| between coefficient vectors; 1 means proportional."""
    if canonical.degree != found.degree:
        raise ValueError("degree mismatch")
    a, b = canonical.as_vector(), found.as_vector()
    return float(abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b)))


def monotonicity_report(
    norm: Norm,
    kmax: int,
    budget: Budget | None = None,
    seed: int = 0,
    tolerance: float = 1e-3,
) -> tuple[list[tuple[int, float]], list[int]]:
    """Estimates for k = 1..kmax and the k where value(k+1) > value(k) + tolerance."""
    if kmax > 7:
        raise ValueError("kmax above 7 is not supported")
    rows = [(k, estimate_index(norm, k, budget, seed).value) for k in range(1, kmax + 1)]
    flags = [rows[i][0] for i in range(len(rows) - 1) if rows[i + 1][1] > rows[i][1] + tolerance]
    return rows, flags
