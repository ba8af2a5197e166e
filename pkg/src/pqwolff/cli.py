"""Command-line front end: ``pqwolff {wolff,solve,check,verify,constants} --config FILE``.

Exit codes: 0 ok / finite, 1 a verification failed, 2 invalid input,
3 divergent or regime error, 4 fixed-point iteration did not converge.
Every error is reported as one JSON object on standard error.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .bounds import (ConstantsBundle, recursion_limits, verify_lambda_inequality, verify_lower_bound,
                     verify_sandwich, verify_truncated_center_bound)
from .conditions import (check_consolidated, check_necessary, check_sufficient,
                         weighted_potential_inequality_check)
from .config import ConfigError, load_config
from .errors import DomainError, PqWolffError, RegimeError, UnsupportedMeasureError
from .fixedpoint import IterationConfig, solve
from .orlicz import check_growth_envelopes
from .wolff import RadialProfile, evaluate, profile_csv_text

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_DIVERGENT, EXIT_NOCONV = 0, 1, 2, 3, 4


def _clean(obj):
    """JSON-safe copy: numpy scalars to python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _write(out, name, text):
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, name)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


def _say(args, msg):
    if not args.quiet:
        print(msg)


def _packed(cfg):
    nf = cfg.nf
    if cfg.wolff_kind == "Wp":
        return np.array([nf.p, nf.p, 1.0])
    if cfg.wolff_kind == "Wq":
        return np.array([nf.q, nf.q, 1.0])
    return nf.packed(0)


def _meta(cfg):
    nf = cfg.nf
    return {"n": nf.n, "p": nf.p, "q": nf.q, "version": __version__,
            "wolff": {"A": cfg.wolff.A, "R": cfg.wolff.R, "rel_tol": cfg.wolff.rel_tol,
                      "kind": cfg.wolff_kind, "tail_mode": cfg.wolff.tail_mode},
            "grid": {"points": int(cfg.grid.size), "r_min": float(cfg.grid[0]), "r_max": float(cfg.grid[-1])}}


def cmd_wolff(cfg, args):
    cfg.need("nf", "measure")
    m = cfg.measure
    # radial measures: any direction; otherwise points (r, 0, ..., 0) on the first axis
    res = evaluate(_packed(cfg), m, cfg.grid, cfg.wolff)
    vals = res.values
    meta = dict(_meta(cfg), radial=m.is_radial, axis="e1",
                infinite_points=int(np.sum(~np.isfinite(vals))), max_level=int(res.levels.max(initial=0)))
    finite = np.isfinite(vals)
    lines = ["r,value"] + [f"{r:.17g},{v:.17g}" if f else f"{r:.17g},inf" for r, v, f in zip(cfg.grid, vals, finite)]
    _write(args.out, "wolff_profile.csv", "\n".join(lines) + "\n")
    _write(args.out, "wolff_meta.json", dumps(meta))
    _say(args, f"wrote {len(vals)} values to {args.out}")
    return EXIT_OK


def cmd_solve(cfg, args):
    cfg.need("nf", "measure")
    law = cfg.law
    ic = IterationConfig(cfg.epsilon, cfg.max_iters, cfg.tol, cfg.grid, cfg.wolff)
    u, rep = solve(law, cfg.measure, ic)
    _write(args.out, "solution.csv", profile_csv_text(u))
    rows = rep.rows + [dict(rep.summary(), kind="summary")]
    _write(args.out, "iterations.jsonl", "".join(json.dumps(_clean(r), sort_keys=True) + "\n" for r in rows))
    summary = dict(_meta(cfg), gamma=law.gamma, sup_u=u.sup(), **rep.summary(),
                   min_increment=rep.min_increment(), modulars_nondecreasing=rep.modulars_nondecreasing())
    _write(args.out, "solve_report.json", dumps(summary))
    _say(args, f"converged={rep.converged} iterations={rep.iterations} residual={rep.final_residual:.3e}")
    return EXIT_OK if rep.converged else EXIT_NOCONV


def cmd_check(cfg, args):
    cfg.need("nf", "measure")
    law = cfg.law
    out = {}
    fns = {"sufficient": check_sufficient, "necessary": check_necessary, "consolidated": check_consolidated}
    for name in cfg.conditions:
        r = fns[name](law, cfg.measure, cfg.wolff, cfg.resolution)
        out[name] = r.to_dict() if hasattr(r, "to_dict") else r
    statuses = [v["status"] for v in out.values()]
    overall = "finite" if all(s == "finite" for s in statuses) else (
        "divergent" if "divergent" in statuses else "inconclusive")
    out = {"conditions": out, "params": dict(_meta(cfg), gamma=law.gamma), "status": overall}
    _write(args.out, "conditions.json", dumps(out))
    _say(args, f"status={overall}")
    return EXIT_OK if overall == "finite" else EXIT_DIVERGENT


def _verify_one(name, cfg, v, cache):
    nf = cfg.nf
    m = cfg.measure
    if name == "recursion":
        cfg.need("gamma")
        return {"check": "recursion", "params": {"gamma": cfg.gamma, "n": nf.n, "p": nf.p, "q": nf.q},
                "pass": True, **recursion_limits(nf.n, nf.p, nf.q, cfg.gamma).to_dict()}
    if name == "envelopes":
        rng = np.random.default_rng(int(v.get("seed", 0)))
        k = int(v.get("samples", 10000))
        samples = np.c_[10 ** rng.uniform(-6, 6, k), 10 ** rng.uniform(-3, 3, k)]
        rep = check_growth_envelopes(nf, samples)
        return {"check": "envelopes", "params": {"n": nf.n, "p": nf.p, "q": nf.q, "samples": k},
                "pass": rep.passed, "margin": min(rep.worst_slack.values()), "details": rep.to_dict()}
    cfg.need("measure")
    if name == "lower_bound":
        law = cfg.law
        if "solution" not in cache:
            ic = IterationConfig(cfg.epsilon, cfg.max_iters, cfg.tol, cfg.grid, cfg.wolff)
            cache["solution"] = solve(law, m, ic)
        u, rep = cache["solution"]
        C = v.get("C", "auto")
        C = recursion_limits(nf.n, nf.p, nf.q, law.gamma).C_star if C == "auto" else float(C)
        r = verify_lower_bound(law, m, u, C, cfg.wolff).to_dict()
        r["details"]["solve_converged"] = rep.converged
        return r
    if name == "lambda_inequality":
        alpha = v.get("alpha", cfg.alpha)
        if alpha is None:
            raise ConfigError("lambda_inequality needs verify.alpha or alpha")
        return verify_lambda_inequality(nf, m, float(alpha), cfg.grid, cfg.wolff).to_dict()
    if name == "sandwich":
        return verify_sandwich(nf, m, cfg.grid, cfg.wolff).to_dict()
    if name == "truncated_center_bound":
        Rs = v.get("R_list", [0.1, 1.0, 10.0, 100.0])
        return verify_truncated_center_bound(nf, m, Rs, cfg.wolff, float(v.get("x0_radius", 0.0)),
                                             float(v.get("bound", 1e3))).to_dict()
    if name == "weighted_potential":
        s_exp = float(v.get("s", 3.0))
        u = RadialProfile(cfg.grid, evaluate(np.array([s_exp, s_exp, 1.0]), m, cfg.grid, cfg.wolff).values)
        return weighted_potential_inequality_check(m, u, float(v.get("r", 0.5)), float(v.get("s", 3.0)),
                                                   float(v.get("alpha", cfg.alpha or 1.0)), cfg.wolff)
    raise ConfigError(f"unknown verification {name!r}")


def cmd_verify(cfg, args):
    cfg.need("nf")
    suite = cfg.verify.get("suite", ["recursion", "envelopes"])
    cache = {}
    results = [_verify_one(name, cfg, cfg.verify, cache) for name in suite]
    ok = all(bool(r["pass"]) for r in results)
    _write(args.out, "verify.json", dumps({"pass": ok, "results": results}))
    for r in results:
        _say(args, f"{r['check']}: {'PASS' if r['pass'] else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_constants(cfg, args):
    cfg.need("nf")
    nf = cfg.nf
    if cfg.gamma is None and cfg.alpha is None:
        raise ConfigError("constants needs gamma and/or alpha")
    bundle = ConstantsBundle(nf.n, nf.p, nf.q, cfg.gamma, cfg.alpha).to_dict()
    text = dumps(bundle)
    sys.stdout.write(text)
    if args.out:
        _write(args.out, "constants.json", text)
    return EXIT_OK


COMMANDS = {"wolff": cmd_wolff, "solve": cmd_solve, "check": cmd_check, "verify": cmd_verify,
            "constants": cmd_constants}


def build_parser():
    ap = argparse.ArgumentParser(prog="pqwolff", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="YAML run configuration")
        sp.add_argument("--out", default=None if name == "constants" else "out", help="output directory")
        sp.add_argument("--quiet", action="store_true", help="suppress progress messages")
    return ap


def _error(code, exc):
    payload = {"error": {"code": code, "message": str(exc), "type": type(exc).__name__}}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if cfg.command is not None and cfg.command != args.command:
            raise ConfigError(f"config is for {cfg.command!r}, not {args.command!r}")
        return COMMANDS[args.command](cfg, args)
    except RegimeError as exc:
        _error(exc.code, exc)
        return EXIT_DIVERGENT
    except (DomainError, UnsupportedMeasureError) as exc:
        _error(getattr(exc, "code", "domain"), exc)
        return EXIT_INVALID
    except PqWolffError as exc:
        _error(exc.code, exc)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - the contract is structured errors only
        _error("internal", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
