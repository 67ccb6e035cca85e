"""Homogeneous polynomials and polynomial maps of the plane.

A k-homogeneous scalar polynomial is stored as the dense list ``c`` with
``q(x, y) = sum_i c[i] x^(k-i) y^i``. Products of homogeneous polynomials are
then plain convolutions of coefficient lists.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq, minimize_scalar

from .norms import Lp, Norm, Polyhedral, sphere_point


@dataclass(frozen=True)
class ScalarHomoPoly:
    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        if len(c) < 2:
            raise ValueError("homogeneous polynomial needs degree >= 1")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, degree: int) -> ScalarHomoPoly:
        return cls((0.0,) * (degree + 1))

    @classmethod
    def from_terms(cls, degree: int, terms: dict[int, float]) -> ScalarHomoPoly:
        """Build from ``{i: c}`` meaning ``c x^(degree-i) y^i``; repeated powers add."""
        c = [0.0] * (degree + 1)
        for i, val in terms.items():
            c[i] += val
        return cls(tuple(c))

    def __call__(self, v):
        return eval_scalar(self, v)

    def __add__(self, other: ScalarHomoPoly) -> ScalarHomoPoly:
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return ScalarHomoPoly(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> ScalarHomoPoly:
        return ScalarHomoPoly(tuple(-a for a in self.coeffs))

    def __sub__(self, other: ScalarHomoPoly) -> ScalarHomoPoly:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ScalarHomoPoly):
            return ScalarHomoPoly(tuple(np.convolve(self.coeffs, other.coeffs)))
        return ScalarHomoPoly(tuple(a * other for a in self.coeffs))

    __rmul__ = __mul__

    def times_y(self) -> ScalarHomoPoly:
        return ScalarHomoPoly((0.0,) + self.coeffs)

    def times_x(self) -> ScalarHomoPoly:
        return ScalarHomoPoly(self.coeffs + (0.0,))

    def compose_linear(self, mat) -> ScalarHomoPoly:
        """Coefficients of ``q(M @ (x, y))``."""
        m = np.asarray(mat, dtype=float)
        lx, ly = m[0], m[1]  # rows are the linear forms substituted for x and y
        k = self.degree
        out = np.zeros(k + 1)
        for i, c in enumerate(self.coeffs):
            if c == 0.0:
                continue
            term = np.array([1.0])
            for _ in range(k - i):
                term = np.convolve(term, lx)
            for _ in range(i):
                term = np.convolve(term, ly)
            out += c * term
        return ScalarHomoPoly(tuple(out))

    def on_segment(self, start, end) -> np.ndarray:
        """Power-basis coefficients in s of ``q(start + s (end - start))``."""
        p0 = np.asarray(start, dtype=float)
        d = np.asarray(end, dtype=float) - p0
        xs, ys = np.array([p0[0], d[0]]), np.array([p0[1], d[1]])
        k = self.degree
        out = np.zeros(k + 1)
        for i, c in enumerate(self.coeffs):
            if c == 0.0:
                continue
            term = npoly.polymul(npoly.polypow(xs, k - i), npoly.polypow(ys, i))
            out[: len(term)] += c * term
        return out

    def to_list(self) -> list[float]:
        return list(self.coeffs)


def eval_scalar(q: ScalarHomoPoly, v):
    """Evaluate on points of shape ``(..., 2)``.

    Horner runs in y/x where |x| >= |y| and in x/y elsewhere, so the variable
    stays in [-1, 1].
    """
    v = np.asarray(v, dtype=float)
    x, y = v[..., 0], v[..., 1]
    c = q.coeffs
    k = q.degree
    use_x = np.abs(x) >= np.abs(y)
    lead = np.where(use_x, x, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(use_x, y, x) / lead
    t = np.where(lead == 0.0, 0.0, t)
    hx = np.full_like(t, c[k])
    for ci in c[k - 1 :: -1]:
        hx = hx * t + ci
    hy = np.full_like(t, c[0])
    for ci in c[1:]:
        hy = hy * t + ci
    return lead**k * np.where(use_x, hx, hy)


@dataclass(frozen=True)
class VectorHomoPoly:
    """A k-homogeneous polynomial map (p1, p2) of the plane into itself."""

    p1: ScalarHomoPoly
    p2: ScalarHomoPoly

    def __post_init__(self):
        if self.p1.degree != self.p2.degree:
            raise ValueError("components must share the degree")

    @property
    def degree(self) -> int:
        return self.p1.degree

    @classmethod
    def from_lists(cls, c1, c2) -> VectorHomoPoly:
        return cls(ScalarHomoPoly(tuple(c1)), ScalarHomoPoly(tuple(c2)))

    @classmethod
    def from_vector(cls, k: int, c) -> VectorHomoPoly:
        c = np.asarray(c, dtype=float)
        if c.shape != (2 * (k + 1),):
            raise ValueError(f"expected {2 * (k + 1)} coefficients")
        return cls.from_lists(c[: k + 1], c[k + 1 :])

    @classmethod
    def identity(cls) -> VectorHomoPoly:
        return cls.from_lists([1.0, 0.0], [0.0, 1.0])

    @classmethod
    def zero(cls, k: int) -> VectorHomoPoly:
        return cls(ScalarHomoPoly.zero(k), ScalarHomoPoly.zero(k))

    def as_vector(self) -> np.ndarray:
        return np.array(self.p1.coeffs + self.p2.coeffs)

    def __call__(self, v):
        return eval_vector(self, v)

    def __add__(self, other: VectorHomoPoly) -> VectorHomoPoly:
        return VectorHomoPoly(self.p1 + other.p1, self.p2 + other.p2)

    def __mul__(self, s: float) -> VectorHomoPoly:
        return VectorHomoPoly(self.p1 * s, self.p2 * s)

    __rmul__ = __mul__

    def __neg__(self) -> VectorHomoPoly:
        return self * -1.0

    def conjugate(self, mat) -> VectorHomoPoly:
        """``S^-1 o P o S`` for an invertible linear map ``S``."""
        s = np.asarray(mat, dtype=float)
        inv = np.linalg.inv(s)
        c1, c2 = self.p1.compose_linear(s), self.p2.compose_linear(s)
        return VectorHomoPoly(c1 * inv[0, 0] + c2 * inv[0, 1], c1 * inv[1, 0] + c2 * inv[1, 1])

    def to_json(self) -> dict:
        return {"degree": self.degree, "p1": self.p1.to_list(), "p2": self.p2.to_list()}

    @classmethod
    def from_json(cls, obj: dict) -> VectorHomoPoly:
        p = cls.from_lists(obj["p1"], obj["p2"])
        if "degree" in obj and int(obj["degree"]) != p.degree:
            raise ValueError("degree field does not match coefficient length")
        return p


def eval_vector(P: VectorHomoPoly, v):
    return np.stack([eval_scalar(P.p1, v), eval_scalar(P.p2, v)], axis=-1)


def q_poly(P: VectorHomoPoly) -> ScalarHomoPoly:
    """y P1 - x P2, of degree k + 1."""
    return P.p1.times_y() - P.p2.times_x()


def q_definite(Q: ScalarHomoPoly, grid: int = 8192, threshold: float = 1e-10):
    """Decide whether Q vanishes only at the origin.

    Returns ``(definite, witness, min_abs)`` where the witness is a unit
    Euclidean vector at which |Q| is smallest (or a root, for odd degree).
    """
    ts = np.linspace(0.0, np.pi, grid, endpoint=False)

    def g(t):
        return float(eval_scalar(Q, np.array([math.cos(t), math.sin(t)])))

    vals = eval_scalar(Q, np.stack([np.cos(ts), np.sin(ts)], axis=-1))
    if Q.degree % 2 == 1:
        # Q(-v) = -Q(v): a sign change on the closed half circle is guaranteed
        ext = np.append(vals, -vals[0])
        te = np.append(ts, np.pi)
        j = int(np.argmax(ext[:-1] * ext[1:] <= 0))
        root = te[j] if ext[j] == 0 else brentq(g, te[j], te[j + 1], xtol=1e-15)
        return False, np.array([math.cos(root), math.sin(root)]), 0.0
    j = int(np.argmin(np.abs(vals)))
    h = np.pi / grid
    res = minimize_scalar(
        lambda t: abs(g(t)), bounds=(ts[j] - h, ts[j] + h), method="bounded",
        options={"xatol": 1e-14},
    )
    t_best, m = (float(res.x), float(res.fun)) if res.fun < abs(vals[j]) else (ts[j], abs(vals[j]))
    witness = np.array([math.cos(t_best), math.sin(t_best)])
    return bool(m > threshold), witness, m


def _max_abs_on_unit_interval(c: np.ndarray) -> tuple[float, float]:
    """max |p(s)| over s in [0, 1] for power-basis coefficients c; returns (value, argmax)."""
    cand = [0.0, 1.0]
    d = np.trim_zeros(npoly.polyder(c), "b")
    if len(d) > 1:
        for r in npoly.polyroots(d):
            if abs(r.imag) < 1e-9 and 0.0 < r.real < 1.0:
                cand.append(float(r.real))
    vals = np.abs(npoly.polyval(np.array(cand), c))
    j = int(np.argmax(vals))
    return float(vals[j]), cand[j]


def _refine_max(fn, ts: np.ndarray, vals: np.ndarray, tol: float, n_cells: int = 4):
    """Refine the best grid cells of a periodic scalar function with bounded Brent."""
    h = ts[1] - ts[0]
    order = np.argsort(-vals, kind="stable")[:n_cells]
    best_t, best_v = float(ts[order[0]]), float(vals[order[0]])
    for j in order:
        res = minimize_scalar(
            lambda t: -fn(t), bounds=(ts[j] - h, ts[j] + h), method="bounded",
            options={"xatol": tol},
        )
        if -res.fun > best_v:
            best_t, best_v = float(res.x), float(-res.fun)
    return best_t, best_v


def sup_norm(P: VectorHomoPoly, norm: Norm, tol: float = 1e-12, grid: int = 4096) -> float:
    """||P|| = sup of ||P(x)|| over the unit sphere of ``norm``.

    Polyhedral norms are handled exactly edge by edge; otherwise a grid over the
    half circle (||P(-x)|| = ||P(x)||) is refined to ``tol`` in angle.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(norm, Polyhedral):
        best = 0.0
        for a, b, _ in norm.edges():
            e1, e2 = P.p1.on_segment(a, b), P.p2.on_segment(a, b)
            for f in norm.dual_vertices():
                best = max(best, _max_abs_on_unit_interval(f[0] * e1 + f[1] * e2)[0])
        return best
    grid = max(grid, 4096)
    ts = np.linspace(0.0, np.pi, grid, endpoint=False)

    def fn(t):
        return float(norm.eval(eval_vector(P, sphere_point(norm, t))))

    vals = norm.eval(eval_vector(P, sphere_point(norm, ts)))
    return _refine_max(fn, ts, vals, tol)[1]


# -- polarization ------------------------------------------------------------


@dataclass(frozen=True)
class SymMultiForm:
    """The symmetric n-linear form A with A(x, ..., x) = R(x), n = deg R even."""

    generator: ScalarHomoPoly

    @property
    def order(self) -> int:
        return self.generator.degree

    def __call__(self, *vectors) -> float:
        n = self.order
        if len(vectors) != n:
            raise ValueError(f"form of order {n} takes {n} vectors")
        V = np.asarray(vectors, dtype=float)
        signs = _sign_matrix(n)
        vals = eval_scalar(self.generator, signs @ V) * np.prod(signs, axis=1)
        return math.fsum(vals) / (2**n * math.factorial(n))

    def diagonal_with(self, x, w) -> float:
        """A(x, ..., x, w)."""
        return self(*([x] * (self.order - 1)), w)


_SIGNS: dict[int, np.ndarray] = {}


def _sign_matrix(n: int) -> np.ndarray:
    if n not in _SIGNS:
        _SIGNS[n] = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    return _SIGNS[n]


def polarize(R: ScalarHomoPoly) -> SymMultiForm:
    if R.degree % 2:
        raise ValueError("polarize needs an even-degree generator")
    return SymMultiForm(R)


def _monomial_matrix(angles: np.ndarray, degree: int) -> np.ndarray:
    c, s = np.cos(angles), np.sin(angles)
    return np.stack([c ** (degree - i) * s**i for i in range(degree + 1)], axis=-1)


def tangent_poly(R: ScalarHomoPoly, x0, y0) -> VectorHomoPoly:
    """P(x) = -A(x,...,x,y0) x0 + A(x,...,x,x0) y0 for the form A polarizing R.

    Each component is a homogeneous polynomial of degree deg R - 1; its
    coefficients are recovered by interpolation at fixed Chebyshev angles
    ``pi (j + 1/2) / deg R`` of the upper half circle.
    """
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    form = polarize(R)
    det = x0[0] * y0[1] - x0[1] * y0[0]
    if abs(det) <= 1e-12 * np.linalg.norm(x0) * np.linalg.norm(y0) or det == 0.0:
        raise ValueError("x0 and y0 must be linearly independent")
    definite, _, _ = q_definite(R)
    if not definite or float(eval_scalar(R, np.array([1.0, 0.0]))) < 0:
        raise ValueError("generator must be positive off the origin")
    n = R.degree
    nodes = np.pi * (np.arange(n) + 0.5) / n
    pts = np.stack([np.cos(nodes), np.sin(nodes)], axis=-1)
    a_x0 = np.array([form.diagonal_with(p, x0) for p in pts])
    a_y0 = np.array([form.diagonal_with(p, y0) for p in pts])
    M = _monomial_matrix(nodes, n - 1)
    cx0 = np.linalg.lstsq(M, a_x0, rcond=None)[0]
    cy0 = np.linalg.lstsq(M, a_y0, rcond=None)[0]
    c1 = -cy0 * x0[0] + cx0 * y0[0]
    c2 = -cy0 * x0[1] + cx0 * y0[1]
    return VectorHomoPoly.from_lists(c1, c2)


# -- explicit zero-radius constructions ---------------------------------------


def quartic_generator(beta: float) -> ScalarHomoPoly:
    """x^4 + 2 beta x^2 y^2 + y^4."""
    return ScalarHomoPoly((1.0, 0.0, 2.0 * beta, 0.0, 1.0))


def lp_zero_poly(p: int) -> VectorHomoPoly:
    """(-y^(p-1), x^(p-1)), which has numerical radius zero on l_p^2 for even p."""
    if int(p) != p or p < 2 or int(p) % 2:
        raise ValueError(f"lp_zero_poly needs an even integer p >= 2, got {p}")
    k = int(p) - 1
    return VectorHomoPoly(
        ScalarHomoPoly.from_terms(k, {k: -1.0}), ScalarHomoPoly.from_terms(k, {0: 1.0})
    )


def asym_zero_poly(a: float) -> VectorHomoPoly:
    """The cubic map with numerical radius zero for the ``AsymA(a)`` norm."""
    if not 0.0 < a < 1.0:
        raise ValueError(f"asym_zero_poly needs 0 < a < 1, got {a}")
    r = a / (1.0 + a)
    p1 = ScalarHomoPoly.from_terms(3, {1: r**a * (1 + 2 * a) / (1 + a), 3: r ** (1 + 2 * a)})
    p2 = ScalarHomoPoly.from_terms(3, {0: -1.0})
    return VectorHomoPoly(p1, p2)


def _interp_poly(m: int, theta: float) -> VectorHomoPoly:
    k = 2 * m - 1
    t, s = theta, 1.0 - theta
    p1 = ScalarHomoPoly.from_terms(k, {1: t, k: t})
    p1 = p1 + ScalarHomoPoly.from_terms(k, {k - 2: s, k: s})
    p2 = ScalarHomoPoly.from_terms(k, {0: -t, k - 1: -t})
    p2 = p2 + ScalarHomoPoly.from_terms(k, {0: -s, 2: -s})
    return VectorHomoPoly(p1, p2)


def interp_zero_poly(m: int, theta: float) -> VectorHomoPoly:
    """The degree 2m-1 map with numerical radius zero for ``InterpSym(m, theta)``."""
    if int(m) != m or m < 3:
        raise ValueError(f"interp_zero_poly needs integer m >= 3, got {m}")
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    return _interp_poly(int(m), theta)


# -- embedding into l_p^d -----------------------------------------------------


@dataclass(frozen=True)
class EmbeddedPoly:
    """A plane map acting on the first two coordinates of R^d, zero elsewhere."""

    base: VectorHomoPoly
    dim: int

    @property
    def degree(self) -> int:
        return self.base.degree

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        out = np.zeros_like(v)
        out[..., :2] = eval_vector(self.base, v[..., :2])
        return out


def embed_lp(P: VectorHomoPoly, d: int) -> EmbeddedPoly:
    if int(d) != d or d < 2:
        raise ValueError("embedding dimension must be an integer >= 2")
    return EmbeddedPoly(P, int(d))


def lp_norming_functional(p: float, v) -> np.ndarray:
    """x_i |x_i|^(p-2) / ||x||_p^(p-1), the norming functional on l_p^d."""
    v = np.asarray(v, dtype=float)
    return Lp(p, v.shape[-1]).gradient(v)
