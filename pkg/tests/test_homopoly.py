import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnindex.homopoly import (
    ScalarHomoPoly,
    VectorHomoPoly,
    asym_zero_poly,
    embed_lp,
    eval_scalar,
    interp_zero_poly,
    lp_norming_functional,
    lp_zero_poly,
    polarize,
    q_definite,
    q_poly,
    quartic_generator,
    sup_norm,
    tangent_poly,
)
from pnindex.norms import Lp, Polyhedral, sphere_point

coef = st.floats(-5, 5, allow_nan=False)


def vec_polys(k):
    return st.lists(coef, min_size=2 * k + 2, max_size=2 * k + 2).map(
        lambda c: VectorHomoPoly.from_vector(k, np.array(c))
    )


def test_scalar_evaluation_matches_monomials():
    q = ScalarHomoPoly((1.0, -2.0, 0.5, 3.0))  # x^3 - 2x^2y + 0.5xy^2 + 3y^3
    for x, y in [(1.3, -0.2), (0.01, 4.0), (-2.0, 0.0)]:
        want = x**3 - 2 * x * x * y + 0.5 * x * y * y + 3 * y**3
        assert eval_scalar(q, (x, y)) == pytest.approx(want, rel=1e-14)
    assert eval_scalar(q, (0.0, 0.0)) == 0.0


def test_from_terms_and_products():
    q = ScalarHomoPoly.from_terms(2, {0: 1.0, 2: 1.0, 1: 0.0})
    assert q.to_list() == [1.0, 0.0, 1.0]
    sq = q * q
    assert sq.to_list() == [1.0, 0.0, 2.0, 0.0, 1.0]
    assert (q * 2.0).to_list() == [2.0, 0.0, 2.0]
    assert q.times_y().to_list() == [0.0, 1.0, 0.0, 1.0]


@settings(max_examples=50, deadline=None)
@given(vec_polys(3), vec_polys(3), coef)
def test_q_poly_is_linear(P, R, t):
    lhs = q_poly(P + R * t).to_list()
    rhs = (q_poly(P) + q_poly(R) * t).to_list()
    assert np.allclose(lhs, rhs, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(vec_polys(3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2))
def test_vector_homogeneity(P, x, y, t):
    v = np.array([x, y])
    assert np.allclose(P(t * v), t**3 * P(v), atol=1e-9 * (1 + abs(t) ** 3 * np.abs(P(v)).max()))


def test_q_poly_of_lp_zero_map():
    # (-y^3, x^3): Q = y(-y^3) - x(x^3) = -(x^4 + y^4)
    assert q_poly(lp_zero_poly(4)).to_list() == [-1.0, 0.0, 0.0, 0.0, -1.0]
    definite, witness, min_abs = q_definite(q_poly(lp_zero_poly(4)))
    assert definite and min_abs > 0.4


def test_q_definite_finds_zero():
    definite, witness, _ = q_definite(ScalarHomoPoly((1.0, 0.0, -1.0)))  # x^2 - y^2
    assert not definite
    assert abs(abs(witness[0]) - abs(witness[1])) < 1e-8


def test_conjugation_by_identity_and_swap():
    P = VectorHomoPoly.from_lists([1.0, 2.0, 0.0], [0.0, -1.0, 3.0])
    assert P.conjugate(np.eye(2)) == P
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    C = P.conjugate(swap)
    v = np.array([0.7, -1.1])
    assert np.allclose(C(v), swap @ P(swap @ v))


def test_json_round_trip():
    P = asym_zero_poly(0.3)
    assert VectorHomoPoly.from_json(P.to_json()) == P
    with pytest.raises((KeyError, ValueError)):
        VectorHomoPoly.from_json({"degree": 2, "p1": [1, 2], "p2": [1, 2, 3]})


def test_sup_norm_exact_cases():
    assert sup_norm(lp_zero_poly(4), Lp(4)) == pytest.approx(1.0, abs=1e-12)
    assert sup_norm(VectorHomoPoly.from_lists([1.0, 0.0, 0.0], [0.0, 0.0, 0.0]), Polyhedral("Linf")) == 1.0
    # (xy, 0) on the square peaks at a corner
    P = VectorHomoPoly.from_lists([0.0, 1.0, 0.0], [0.0, 0.0, 0.0])
    assert sup_norm(P, Polyhedral("Linf")) == 1.0
    assert sup_norm(P, Polyhedral("L1")) == pytest.approx(0.25)


def _polarize_brute(R, vectors):
    n = len(vectors)
    total = []
    for eps in product((1, -1), repeat=n):
        s = sum(e * np.asarray(v, float) for e, v in zip(eps, vectors))
        total.append(np.prod(eps) * float(R(s)))
    return math.fsum(total) / (2**n * math.factorial(n))


def test_polarization_values():
    R = quartic_generator(1.0)  # (x^2 + y^2)^2
    A = polarize(R)
    e1, e2 = (1.0, 0.0), (0.0, 1.0)
    assert A(e1, e1, e1, e2) == 0.0
    assert A(e1, e1, e2, e2) == pytest.approx(1 / 3, abs=1e-15)
    with pytest.raises(ValueError):
        polarize(ScalarHomoPoly((1.0, 0.0, 0.0, 1.0)))


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=5, max_size=5), st.lists(st.floats(-2, 2), min_size=8, max_size=8))
def test_polarization_round_trip(c, raw):
    R = ScalarHomoPoly(tuple(c))
    A = polarize(R)
    vs = np.array(raw).reshape(4, 2)
    x = vs[0]
    assert A(x, x, x, x) == pytest.approx(float(R(x)), rel=1e-9, abs=1e-9)
    assert A(*vs) == pytest.approx(_polarize_brute(R, vs), rel=1e-9, abs=1e-9)
    # A(x, x, x, w) is the directional derivative of R divided by the degree
    w, h = vs[1], 1e-5
    fd = (float(R(x + h * w)) - float(R(x - h * w))) / (2 * h) / 4
    assert A.diagonal_with(x, w) == pytest.approx(fd, rel=1e-6, abs=1e-6)


def test_tangent_poly_of_quartic():
    P = tangent_poly(quartic_generator(2.0), [1, 0], [0, 1])
    v = np.array([0.6, -0.3])
    x, y = v
    assert np.allclose(P(v), [-2 * x * x * y - y**3, x**3 + 2 * x * y * y], atol=1e-12)


def test_tangent_poly_rejects_bad_input():
    with pytest.raises(ValueError):
        tangent_poly(quartic_generator(2.0), [1, 0], [2, 0])
    with pytest.raises(ValueError):
        tangent_poly(ScalarHomoPoly((1.0, 0.0, 0.0, 0.0, -1.0)), [1, 0], [0, 1])


def test_named_constructors_validate():
    with pytest.raises(ValueError):
        lp_zero_poly(3)
    with pytest.raises(ValueError):
        interp_zero_poly(2, 0.5)
    assert asym_zero_poly(0.3).degree == 3
    assert interp_zero_poly(4, 1.0).degree == 7


def test_embedding_pairs_to_zero():
    E = embed_lp(lp_zero_poly(4), 3)
    rng = np.random.default_rng(0)
    x = rng.standard_normal((500, 3))
    x /= Lp(4, 3)(x)[:, None]
    f = lp_norming_functional(4, x)
    assert np.allclose(np.sum(f * x, axis=1), 1.0)
    assert np.max(np.abs(np.sum(f * E(x), axis=1))) < 1e-13


def test_segment_parametrization():
    q = ScalarHomoPoly((1.0, 0.0, -1.0))
    c = q.on_segment(np.array([1.0, -1.0]), np.array([1.0, 1.0]))
    s = np.linspace(0, 1, 7)
    pts = np.array([1.0, -1.0]) + s[:, None] * np.array([0.0, 2.0])
    assert np.allclose(np.polynomial.polynomial.polyval(s, c), q(pts))
