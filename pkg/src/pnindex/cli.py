"""Command-line front end: experiments, named reproduction recipes, JSON/CSV output.

Exit status: 0 on success, 2 on invalid input, 3 when a recipe's check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import convexity as cx
from .homopoly import (
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
from .index_search import Budget, estimate_index, min_zero_degree, monotonicity_report
from .norms import (
    AsymA,
    BetaQuartic,
    EpsGeomMean,
    GeomMean,
    InterpSym,
    Lp,
    Norm,
    Polyhedral,
    norm_from_json,
    norming_set,
    sphere_point,
)
from .numrange import radius, thm_norming, verify_zero

SCHEMA = 1
COMMANDS = ("radius", "index", "min-degree", "convexity", "beta-classify", "recipe")
CSV_COLUMNS = ("k", "norm", "estimate", "certified", "seed", "witness_angle")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


# -- building inputs -----------------------------------------------------------

NORM_NAMES = {
    "lp": lambda c: Lp(_req(c, "p"), int(c.get("d") or 2)),
    "l1": lambda c: Polyhedral("L1"),
    "linf": lambda c: Polyhedral("Linf"),
    "beta-quartic": lambda c: BetaQuartic(_req(c, "beta")),
    "asym": lambda c: AsymA(_req(c, "a")),
    "interp": lambda c: InterpSym(int(_req(c, "m")), _req(c, "theta")),
    "geom-mean": lambda c: GeomMean(_req(c, "p0"), _req(c, "p1"), _req(c, "theta")),
    "eps-geom-mean": lambda c: EpsGeomMean(_req(c, "theta"), _req(c, "eps")),
}

POLY_NAMES = {
    "lp-zero": lambda c: lp_zero_poly(_req(c, "p")),
    "asym-zero": lambda c: asym_zero_poly(_req(c, "a")),
    "interp-zero": lambda c: interp_zero_poly(int(_req(c, "m")), _req(c, "theta")),
    "tangent": lambda c: tangent_poly(quartic_generator(_req(c, "beta")), [1, 0], [0, 1]),
}


def _req(cfg: dict, key: str):
    if cfg.get(key) is None:
        raise ConfigError(f"missing required field '{key}'")
    return cfg[key]


def build_norm(cfg: dict) -> Norm:
    raw = cfg.get("norm")
    if raw is None:
        raise ConfigError("missing required field 'norm'")
    try:
        if isinstance(raw, dict):
            return norm_from_json(raw)
        if isinstance(raw, str) and raw.lstrip().startswith("{"):
            return norm_from_json(json.loads(raw))
        if raw not in NORM_NAMES:
            raise ConfigError(f"field 'norm': unknown variant {raw!r}")
        return NORM_NAMES[raw](cfg)
    except ConfigError:
        raise
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"field 'norm': {exc}") from exc


def build_poly(cfg: dict) -> VectorHomoPoly:
    raw = cfg.get("polynomial")
    if raw is None:
        raise ConfigError("missing required field 'polynomial'")
    try:
        if isinstance(raw, dict):
            return VectorHomoPoly.from_json(raw)
        if isinstance(raw, str) and raw.lstrip().startswith("{"):
            return VectorHomoPoly.from_json(json.loads(raw))
        if raw not in POLY_NAMES:
            raise ConfigError(f"field 'polynomial': unknown constructor {raw!r}")
        return POLY_NAMES[raw](cfg)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"field 'polynomial': {exc}") from exc


def _budget(cfg: dict) -> Budget:
    try:
        return Budget(
            starts=int(cfg.get("starts") or 64),
            iterations=int(cfg.get("iterations") or Budget.iterations),
        )
    except ValueError as exc:
        raise ConfigError(f"field 'starts': {exc}") from exc


def _positive(cfg: dict, key: str, default: float) -> float:
    val = cfg.get(key)
    val = default if val is None else float(val)
    if not val > 0:
        raise ConfigError(f"field '{key}' must be positive")
    return val


# -- output --------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def emit_table(rows: list[dict]) -> str:
    """CSV with a fixed column order; reals at 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".pnindex-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- commands ------------------------------------------------------------------


def cmd_radius(cfg: dict):
    norm, P = build_norm(cfg), build_poly(cfg)
    tol = _positive(cfg, "tol", 1e-12)
    zero_tol = _positive(cfg, "zero_tol", 1e-9)
    est = radius(P, norm, tol=tol, grid=int(cfg.get("grid") or 4096))
    zero, found = verify_zero(P, norm, zero_tol)
    row = {"k": P.degree, "norm": norm.label(), "estimate": est.value, "certified": zero,
           "seed": int(cfg.get("seed") or 0), "witness_angle": est.witness_angle}
    res = {"norm": norm.to_json(), "polynomial": P.to_json(), "radius": est.to_json(),
           "zero_certified": zero, "zero_tol": zero_tol, "max_pairing": found}
    if cfg.get("samples"):
        write_atomic(cfg["samples"], sample_table(P, norm, int(cfg.get("n_samples") or 1024)))
    return res, [row], True


def sample_table(P: VectorHomoPoly, norm: Norm, n: int) -> str:
    """Plot-ready CSV of the numerical range along the sphere: angle, point, functional, value."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("angle", "x", "y", "fx", "fy", "value"))
    ts = 2 * np.pi * np.arange(n) / n
    pts = sphere_point(norm, ts)
    for t, x in zip(ts, pts):
        px = P(x)
        for f in norming_set(norm, x):
            w.writerow([_fmt(float(c)) for c in (t, x[0], x[1], f[0], f[1], f @ px)])
    return buf.getvalue()


def cmd_index(cfg: dict):
    norm = build_norm(cfg)
    seed = int(cfg.get("seed") or 0)
    budget = _budget(cfg)
    if cfg.get("kmax") is not None:
        rows, flags = monotonicity_report(norm, int(cfg["kmax"]), budget, seed)
        table = [{"k": k, "norm": norm.label(), "estimate": v, "certified": v <= 1e-6, "seed": seed}
                 for k, v in rows]
        return {"norm": norm.to_json(), "estimates": [list(r) for r in rows],
                "monotonicity_flags": flags}, table, True
    k = int(_req(cfg, "k"))
    est = estimate_index(norm, k, budget, seed)
    row = {"k": k, "norm": norm.label(), "estimate": est.value,
           "certified": est.value <= 1e-6, "seed": seed}
    return {"norm": norm.to_json(), "estimate": est.to_json()}, [row], True


def cmd_min_degree(cfg: dict):
    norm = build_norm(cfg)
    seed = int(cfg.get("seed") or 0)
    res = min_zero_degree(norm, int(cfg.get("kmax") or 5), _budget(cfg), seed)
    rows = [{"k": e.k, "norm": norm.label(), "estimate": e.value,
             "certified": res.k0 == e.k, "seed": seed} for e in res.per_k]
    return {"norm": norm.to_json(), **res.to_json()}, rows, True


def cmd_convexity(cfg: dict):
    norm = build_norm(cfg)
    seed = int(cfg.get("seed") or 0)
    mid = cx.midpoint_test(norm, int(cfg.get("pairs") or 4000), seed)
    out = {"norm": norm.to_json(), "midpoint": mid.to_json()}
    if not isinstance(norm, Polyhedral):
        out["hessian"] = cx.hessian_grid(norm, int(cfg.get("grid") or 256)).to_json()
    return out, [], True


def cmd_beta_classify(cfg: dict):
    v = cx.beta_classify(float(_req(cfg, "beta")))
    return v.to_json(), [], True


# -- recipes -------------------------------------------------------------------


def _recipe_lp_zero(p: int):
    def run(cfg):
        ok, found = verify_zero(lp_zero_poly(p), Lp(p), 1e-10)
        return {"max_pairing": found, "tol": 1e-10}, ok
    return run


def _recipe_embedded(cfg):
    d = int(cfg.get("d") or 3)
    E = embed_lp(lp_zero_poly(4), d)
    rng = np.random.default_rng(int(cfg.get("seed") or 0))
    x = rng.standard_normal((10_000, d))
    x /= Lp(4, d).eval(x)[:, None]
    worst = float(np.max(np.abs(np.sum(lp_norming_functional(4, x) * E(x), axis=1))))
    return {"dimension": d, "max_pairing": worst}, worst <= 1e-12


def _recipe_hilbert(cfg):
    rot = VectorHomoPoly.from_lists([0.0, -1.0], [1.0, 0.0])
    ok, found = verify_zero(rot, Lp(2), 1e-12)
    return {"max_pairing": found}, ok


def _recipe_beta_family(cfg):
    beta = float(cfg.get("beta") if cfg.get("beta") is not None else 2.0)
    norm = BetaQuartic(beta)
    P = tangent_poly(quartic_generator(beta), [1, 0], [0, 1])
    ok, found = verify_zero(P, norm, 1e-10)
    pts = sphere_point(norm, np.linspace(0, 2 * np.pi, 1024, endpoint=False))
    gap = float(np.max(np.abs(thm_norming(P, pts, norm) - norm.gradient(pts))))
    is_norm = cx.beta_classify(beta).is_norm
    return {"beta": beta, "is_norm": is_norm, "polynomial": P.to_json(), "max_pairing": found,
            "norming_gap": gap}, ok and gap <= 1e-8 and is_norm


def _recipe_asym(cfg):
    a = float(cfg.get("a") or 0.3)
    ok, found = verify_zero(asym_zero_poly(a), AsymA(a), 1e-9)
    return {"a": a, "max_pairing": found}, ok


def _recipe_interp(cfg):
    m = int(cfg.get("m") or 3)
    theta = float(cfg.get("theta") if cfg.get("theta") is not None else 0.4)
    ok, found = verify_zero(interp_zero_poly(m, theta), InterpSym(m, theta), 1e-9)
    return {"m": m, "theta": theta, "max_pairing": found}, ok


EXPECTED_BETA = {-1.0: False, -0.5: False, 0.0: True, 1.0: True, 2.0: True, 3.0: True,
                 3.5: False, 5.0: False}


def _recipe_beta_classification(cfg):
    out, ok = [], True
    for b, expect in EXPECTED_BETA.items():
        v = cx.beta_classify(b)
        good = v.is_norm == expect and (v.is_norm or v.witness.margin >= 1e-10)
        ok &= good
        out.append(v.to_json())
    return {"verdicts": out}, ok


def _recipe_geom_mean(cfg):
    norm = GeomMean(2.0, 6.0, 0.3)
    prof = cx.log_convexity_profile(norm, np.linspace(0, 1, 512))
    mid = cx.midpoint_test(norm)
    ok = prof.fd_error <= 1e-6 and bool(np.all(prof.phi2 >= 0)) and mid.convex
    return {"fd_error": prof.fd_error, "min_phi2": float(prof.phi2.min()),
            "midpoint": mid.to_json()}, ok


def _recipe_asym_convexity(cfg):
    norm = AsymA(float(cfg.get("a") or 0.35))
    prof = cx.log_convexity_profile(norm, np.linspace(-5, 5, 512))
    hess = cx.hessian_grid(norm)
    ok = prof.fd_error <= 1e-6 and float(prof.curvature.min()) >= -1e-9 and hess.convex
    return {"fd_error": prof.fd_error, "min_curvature": float(prof.curvature.min()),
            "hessian": hess.to_json()}, ok


def _recipe_eps(cfg):
    w = cx.eps_counterexample(0.5, [1.0, 0.1, 0.01])
    return {"witness": w.to_json() if w else None}, w is not None and w.eps == 0.01


def _recipe_square(cfg):
    est = estimate_index(Polyhedral("Linf"), 2, _budget(cfg), int(cfg.get("seed") or 0))
    return {"estimate": est.to_json()}, 0.45 <= est.value <= 0.55


def _recipe_min_degree(p: int):
    def run(cfg):
        res = min_zero_degree(Lp(p), p - 1, _budget(cfg), int(cfg.get("seed") or 0))
        return res.to_json(), res.k0 == p - 1
    return run


RECIPES = {
    "lp4-cubic-zero": _recipe_lp_zero(4),
    "lp6-quintic-zero": _recipe_lp_zero(6),
    "lp4-embedded-zero": _recipe_embedded,
    "hilbert-rotation-zero": _recipe_hilbert,
    "beta-quartic-family": _recipe_beta_family,
    "asym-norm-zero": _recipe_asym,
    "interp-norm-zero": _recipe_interp,
    "beta-classification": _recipe_beta_classification,
    "geom-mean-convexity": _recipe_geom_mean,
    "asym-norm-convexity": _recipe_asym_convexity,
    "eps-not-a-norm": _recipe_eps,
    "square-order2-index": _recipe_square,
    "lp4-min-degree": _recipe_min_degree(4),
    "lp6-min-degree": _recipe_min_degree(6),
}


def cmd_recipe(cfg: dict):
    name = cfg.get("name")
    if name not in RECIPES:
        raise ConfigError(f"field 'name': unknown recipe {name!r}; choose from {sorted(RECIPES)}")
    payload, ok = RECIPES[name](cfg)
    return {"recipe": name, "passed": bool(ok), **payload}, [], bool(ok)


HANDLERS = {
    "radius": cmd_radius,
    "index": cmd_index,
    "min-degree": cmd_min_degree,
    "convexity": cmd_convexity,
    "beta-classify": cmd_beta_classify,
    "recipe": cmd_recipe,
}


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pnindex", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS)
    ap.add_argument("name", nargs="?", help="recipe name (for the recipe command)")
    ap.add_argument("--config", help="JSON file with the same fields as the flags")
    ap.add_argument("--norm", help=f"one of {sorted(NORM_NAMES)} or a JSON norm object")
    ap.add_argument("--poly", dest="polynomial",
                    help=f"one of {sorted(POLY_NAMES)} or a JSON polynomial object")
    for flag in ("beta", "a", "theta", "p", "p0", "p1", "eps", "tol", "zero-tol"):
        ap.add_argument(f"--{flag}", type=float)
    for flag in ("m", "d", "k", "kmax", "grid", "seed", "starts", "iterations", "pairs"):
        ap.add_argument(f"--{flag}", type=int)
    ap.add_argument("--out")
    ap.add_argument("--samples", help="radius: also write range samples as CSV here")
    ap.add_argument("--n-samples", type=int)
    ap.add_argument("--format", choices=("json", "csv"))
    ap.add_argument("--list", action="store_true", help="list recipe names and exit")
    return ap


def load_config(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"field 'config': {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("field 'config': top level must be an object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    for key, val in vars(args).items():
        if key in ("config", "list"):
            continue
        if val is not None:
            cfg[key] = val
    cfg.setdefault("seed", 0)
    cfg.setdefault("format", "json")
    if cfg.get("command") not in COMMANDS:
        raise ConfigError(f"field 'command': expected one of {list(COMMANDS)}")
    for key in ("tol", "zero_tol"):
        if key in cfg:
            _positive(cfg, key, 1.0)
    return cfg


def run(cfg: dict) -> tuple[int, str]:
    """Execute one validated configuration; returns (exit status, rendered output)."""
    result, rows, ok = HANDLERS[cfg["command"]](cfg)
    if cfg.get("format") == "csv":
        text = emit_table(rows)
    else:
        doc = {"schema": SCHEMA, "command": cfg["command"], "seed": cfg["seed"], "result": result}
        text = json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    return (0 if ok else 3), text


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.list:
        print("\n".join(sorted(RECIPES)))
        return 0
    try:
        cfg = load_config(args)
        status, text = run(cfg)
    except ConfigError as exc:
        print(f"pnindex: {exc}", file=sys.stderr)
        return 2
    if cfg.get("out"):
        write_atomic(cfg["out"], text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
