"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py``; the summary block at the end of
the session lists every criterion.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from pnindex.convexity import beta_classify, eps_counterexample, hessian_grid, log_convexity_profile, midpoint_test
from pnindex.homopoly import (
    VectorHomoPoly,
    asym_zero_poly,
    embed_lp,
    interp_zero_poly,
    lp_norming_functional,
    lp_zero_poly,
    quartic_generator,
    sup_norm,
    tangent_poly,
)
from pnindex.index_search import Budget, estimate_index, min_zero_degree, monotonicity_report, uniqueness_check
from pnindex.norms import AsymA, BetaQuartic, EpsGeomMean, GeomMean, InterpSym, Lp, Polyhedral, sphere_point
from pnindex.numrange import radius, range_samples, thm_norming, verify_zero

DESK = Budget(starts=64)


def report(num: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {num:2d} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def test_01_zero_radius_on_lp():
    parts, ok = [], True
    for p in (4, 6):
        (good, found), secs = timed(verify_zero, lp_zero_poly(p), Lp(p), 1e-10)
        ok &= good and secs < 1.0
        parts.append(f"p={p} max={found:.1e} {secs:.2f}s")
    report(1, "zero radius on l4 and l6", ok, "; ".join(parts))


def test_02_zero_radius_on_nonsymmetric_norms():
    cases = [(asym_zero_poly(a), AsymA(a), f"a={a:.4g}") for a in (0.3, 0.9 / math.sqrt(2), 0.7)]
    cases += [(interp_zero_poly(m, th), InterpSym(m, th), f"m={m},theta={th}") for m, th in ((3, 0.0), (3, 0.4), (4, 1.0))]
    worst, slowest, ok = 0.0, 0.0, True
    for P, norm, _ in cases:
        (good, found), secs = timed(verify_zero, P, norm, 1e-9)
        ok &= good and secs < 2.0
        worst, slowest = max(worst, found), max(slowest, secs)
    report(2, "zero radius on asymmetric and interpolated norms", ok,
           f"{len(cases)} cases, max pairing {worst:.1e}, slowest {slowest:.2f}s")


def test_03_tangent_construction():
    ok, worst = True, 0.0
    for beta in (0.0, 1.0, 2.0, 3.0):
        P = tangent_poly(quartic_generator(beta), [1, 0], [0, 1])
        good, found = verify_zero(P, BetaQuartic(beta), 1e-10)
        ok &= good
        worst = max(worst, found)
    cos = uniqueness_check(lp_zero_poly(4), tangent_poly(quartic_generator(0.0), [1, 0], [0, 1]))
    ok &= cos >= 1 - 1e-9
    report(3, "tangent maps of the quartic family", ok, f"max pairing {worst:.1e}, |cos| vs l4 map {cos:.12f}")


def test_04_norming_functional_formula():
    cases = [
        (lp_zero_poly(4), Lp(4)),
        (tangent_poly(quartic_generator(2.0), [1, 0], [0, 1]), BetaQuartic(2)),
        (asym_zero_poly(0.3), AsymA(0.3)),
        (interp_zero_poly(3, 0.4), InterpSym(3, 0.4)),
    ]
    ts = np.linspace(0, 2 * np.pi, 1024, endpoint=False)
    worst = 0.0
    for P, norm in cases:
        pts = sphere_point(norm, ts)
        worst = max(worst, float(np.max(np.abs(thm_norming(P, pts, norm) - norm.gradient(pts)))))
    report(4, "norming functional read off a zero-radius map", worst <= 1e-8, f"max deviation {worst:.1e}")


@pytest.fixture(scope="module")
def zero_degrees():
    return {p: min_zero_degree(Lp(p), p - 1, DESK, seed=0) for p in (2, 4, 6)}


def test_05_index_estimation(zero_degrees):
    ok, parts = True, []
    for p, res in zero_degrees.items():
        k = p - 1
        est = res.per_k[k - 1]
        ok &= est.value <= 1e-6 and est.elapsed < 30.0 and res.k0 == k
        parts.append(f"l{p} k={k}: {est.value:.1e} in {est.elapsed:.1f}s, k0={res.k0}")
    report(5, "index estimates and minimal zero degree", ok, "; ".join(parts))


def test_06_square_order_two():
    est = estimate_index(Polyhedral("Linf"), 2, DESK, seed=0)
    rng = np.random.default_rng(2024)
    norm, worst = Polyhedral("Linf"), np.inf
    for c in rng.standard_normal((10_000, 6)):
        P = VectorHomoPoly.from_vector(2, c)
        worst = min(worst, radius(P, norm).value / sup_norm(P, norm))
    ok = 0.45 <= est.value <= 0.55 and worst >= 0.5 - 5e-3
    report(6, "order-2 index of the square", ok, f"estimate {est.value:.5f}, min ratio over 10000 random maps {worst:.5f}")


def test_07_monotonicity():
    rows, flags = monotonicity_report(Lp(4), 4, DESK, seed=0)
    vals = ", ".join(f"{v:.3g}" for _, v in rows)
    report(7, "estimates nonincreasing in degree on l4", not flags, f"k=1..4: {vals}")


def test_08_beta_classification():
    expected = {-1.0: False, -0.5: False, 0.0: True, 1.0: True, 2.0: True, 3.0: True, 3.5: False, 5.0: False}
    ok, margins = True, []
    for beta, want in expected.items():
        v = beta_classify(beta)
        ok &= v.is_norm == want
        if not want:
            again = beta_classify(beta).witness
            ok &= v.witness.margin >= 1e-10 and again == v.witness
            margins.append(v.witness.margin)
    agree = []
    for beta in (-0.5, 1.0, 2.0, 3.5, 5.0):
        norm = BetaQuartic(beta)
        m, h = midpoint_test(norm).convex, hessian_grid(norm).convex
        agree.append(m == h == expected[beta])
    ok &= all(agree)
    report(8, "quartic family is a norm exactly on [0, 3]", ok,
           f"min witness margin {min(margins):.2e}, midpoint/Hessian agree on {sum(agree)}/{len(agree)}")


def test_09_log_profiles():
    fams = [
        (GeomMean(2, 6, 0.3), np.linspace(0, 1, 512)),
        (GeomMean(4, 8, 0.7), np.linspace(0, 1, 512)),
        (AsymA(0.3), np.linspace(-5, 5, 512)),
        (AsymA(0.05), np.linspace(-5, 5, 512)),
    ]
    errs, curv = [], np.inf
    for norm, t in fams:
        prof = log_convexity_profile(norm, t)
        errs.append(prof.fd_error)
        if isinstance(norm, AsymA):
            curv = min(curv, float(prof.curvature.min()))
    ok = max(errs) <= 1e-6 and curv >= -1e-9
    report(9, "closed-form log derivatives", ok, f"max FD deviation {max(errs):.1e}, min curvature {curv:.2e}")


def test_10_eps_counterexample():
    w = eps_counterexample(0.5, [1.0, 0.1, 0.01])
    ok = w is not None and w.eps == 0.01
    if ok:
        n = EpsGeomMean(0.5, w.eps)
        ok &= n((1, 1)) > n((1, 0)) + n((0, 1))
    detail = f"eps={w.eps}, n(1,1)={w.n11:.6f} > {w.n10 + w.n01:.6f}" if w else "no witness"
    report(10, "perturbed geometric mean breaks the triangle inequality", ok, detail)


def test_11_isometry_invariance():
    norm = BetaQuartic(2)
    rng = np.random.default_rng(11)
    isos = {"flip": np.diag([1.0, -1.0]), "swap": np.array([[0.0, 1.0], [1.0, 0.0]])}
    worst = 0.0
    for k in (2, 3, 5):
        P = VectorHomoPoly.from_vector(k, rng.standard_normal(2 * k + 2))
        base = np.sort(range_samples(P, norm, 4096))
        for S in isos.values():
            C = P.conjugate(S)
            worst = max(worst, float(np.max(np.abs(np.sort(range_samples(C, norm, 4096)) - base))))
            worst = max(worst, abs(sup_norm(C, norm) - sup_norm(P, norm)))
    report(11, "range and norm invariant under isometries", worst <= 1e-8, f"max deviation {worst:.1e}")


def test_12_embedding():
    E = embed_lp(lp_zero_poly(4), 3)
    x = np.random.default_rng(12).standard_normal((10_000, 3))
    x /= Lp(4, 3)(x)[:, None]
    worst = float(np.max(np.abs(np.sum(lp_norming_functional(4, x) * E(x), axis=1))))
    report(12, "embedded cubic map on l4 in three dimensions", worst <= 1e-12, f"max pairing {worst:.1e}")
