"""Run configuration: a YAML file validated strictly into typed objects.

Schema (all sections optional unless a command needs them)::

    command: wolff | solve | check | verify | constants
    nfunction: {p: 2, q: 3, n: 3}
    gamma: 0.25
    alpha: 1.0
    measure:
      atoms: [{position: [0, 0, 0], mass: 1.0}]
      densities: [{kind: constant|power|gaussian, radius: 1.0, c: 1.0, s: 0.0, width: 1.0}]
    wolff: {A: 1.0 | n_omega_n, R: inf, rel_tol: 1e-10, max_refinement_depth: 8,
            tail_mode: analytic-power | hard-cutoff, kind: WG | Wp | Wq}
    iteration: {epsilon: auto, max_iters: 200, tol: 1e-8}
    grid: {r_min: 1e-4, r_max: 1e4, points: 401}
    check: {conditions: [sufficient, necessary, consolidated], resolution: 1}
    verify: {suite: [...], alpha: 1.0, R_list: [0.1, 1, 10, 100], C: auto, bound: 1000.0,
             x0_radius: 0.0, samples: 10000, seed: 0}
"""

from dataclasses import dataclass, field
import math

import numpy as np
import yaml

from .errors import DomainError
from .measure import Measure, RadialDensity
from .orlicz import NFunction, SublinearLaw
from .wolff import WolffConfig, log_grid

COMMANDS = ("wolff", "solve", "check", "verify", "constants")
VERIFY_SUITE = ("lower_bound", "lambda_inequality", "sandwich", "truncated_center_bound",
                "recursion", "envelopes", "weighted_potential")
CONDITIONS = ("sufficient", "necessary", "consolidated")

_TOP = {"command", "nfunction", "gamma", "alpha", "measure", "wolff", "iteration", "grid", "check", "verify"}
_SECTIONS = {
    "nfunction": {"p", "q", "n"},
    "measure": {"atoms", "densities"},
    "wolff": {"A", "R", "rel_tol", "max_refinement_depth", "tail_mode", "kind"},
    "iteration": {"epsilon", "max_iters", "tol"},
    "grid": {"r_min", "r_max", "points"},
    "check": {"conditions", "resolution"},
    "verify": {"suite", "alpha", "R_list", "C", "bound", "x0_radius", "samples", "seed", "r", "s"},
}


class ConfigError(DomainError):
    code = "validation"


def _num(v, name):
    if isinstance(v, bool):
        raise ConfigError(f"{name} must be a number")
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinity", "+inf"):
            return math.inf
        try:
            return float(v)
        except ValueError:
            raise ConfigError(f"{name} must be a number, got {v!r}") from None
    if not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number, got {v!r}")
    return float(v)


def _int(v, name):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{name} must be an integer, got {v!r}")
    return v


def _section(raw, name):
    sec = raw.get(name, {}) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    unknown = set(sec) - _SECTIONS[name]
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    return sec


@dataclass
class RunConfig:
    command: str = None
    nf: NFunction = None
    gamma: float = None
    alpha: float = None
    measure: Measure = None
    wolff: WolffConfig = field(default_factory=WolffConfig)
    wolff_kind: str = "WG"
    epsilon: object = "auto"
    max_iters: int = 200
    tol: float = 1e-8
    grid: np.ndarray = None
    conditions: tuple = CONDITIONS
    resolution: int = 1
    verify: dict = field(default_factory=dict)

    @property
    def law(self):
        if self.nf is None or self.gamma is None:
            raise ConfigError("this command needs nfunction and gamma")
        return SublinearLaw(self.gamma, self.nf)

    def need(self, *names):
        for nm in names:
            if getattr(self, nm) is None:
                raise ConfigError(f"this command needs {nm!r} in the config")


def parse_measure(sec, n):
    atoms = []
    for i, a in enumerate(sec.get("atoms", []) or []):
        if not isinstance(a, dict) or set(a) - {"position", "mass"}:
            raise ConfigError(f"atom {i} must be a mapping with keys position, mass")
        pos = a.get("position", [0.0] * n)
        if not isinstance(pos, list):
            raise ConfigError(f"atom {i} position must be a list")
        atoms.append(([_num(x, "position") for x in pos], _num(a.get("mass", 1.0), "mass")))
    dens = []
    for i, d in enumerate(sec.get("densities", []) or []):
        if not isinstance(d, dict) or set(d) - {"kind", "radius", "c", "s", "width"}:
            raise ConfigError(f"density {i} has unknown keys")
        if "kind" not in d or "radius" not in d:
            raise ConfigError(f"density {i} needs kind and radius")
        dens.append(RadialDensity(str(d["kind"]), _num(d["radius"], "radius"), _num(d.get("c", 1.0), "c"),
                                  s=_num(d.get("s", 0.0), "s"), width=_num(d.get("width", 1.0), "width")))
    return Measure(n, tuple(atoms), tuple(dens))


def parse_config(raw):
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(raw) - _TOP
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    cfg = RunConfig()
    if "command" in raw:
        if raw["command"] not in COMMANDS:
            raise ConfigError(f"command must be one of {COMMANDS}")
        cfg.command = raw["command"]
    nfs = _section(raw, "nfunction")
    if nfs:
        if "p" not in nfs or "n" not in nfs:
            raise ConfigError("nfunction needs p and n")
        p = _num(nfs["p"], "p")
        cfg.nf = NFunction(p, _num(nfs.get("q", p), "q"), _int(nfs["n"], "n"))
    if "gamma" in raw:
        cfg.gamma = _num(raw["gamma"], "gamma")
    if "alpha" in raw:
        cfg.alpha = _num(raw["alpha"], "alpha")
    ms = _section(raw, "measure")
    if "measure" in raw:
        if cfg.nf is None:
            raise ConfigError("measure needs nfunction.n")
        cfg.measure = parse_measure(ms, cfg.nf.n)
    ws = _section(raw, "wolff")
    kw = {}
    if "A" in ws:
        kw["A"] = ws["A"] if ws["A"] == "n_omega_n" else _num(ws["A"], "A")
    if "R" in ws:
        kw["R"] = _num(ws["R"], "R")
    if "rel_tol" in ws:
        kw["rel_tol"] = _num(ws["rel_tol"], "rel_tol")
    if "max_refinement_depth" in ws:
        kw["max_refinement_depth"] = _int(ws["max_refinement_depth"], "max_refinement_depth")
    if "tail_mode" in ws:
        kw["tail_mode"] = ws["tail_mode"]
    cfg.wolff = WolffConfig(**kw)
    if "kind" in ws:
        if ws["kind"] not in ("WG", "Wp", "Wq"):
            raise ConfigError("wolff.kind must be WG, Wp or Wq")
        cfg.wolff_kind = ws["kind"]
    it = _section(raw, "iteration")
    if "epsilon" in it:
        cfg.epsilon = "auto" if it["epsilon"] == "auto" else _num(it["epsilon"], "epsilon")
    if "max_iters" in it:
        cfg.max_iters = _int(it["max_iters"], "max_iters")
    if "tol" in it:
        cfg.tol = _num(it["tol"], "tol")
    gs = _section(raw, "grid")
    cfg.grid = log_grid(_num(gs.get("r_min", 1e-4), "r_min"), _num(gs.get("r_max", 1e4), "r_max"),
                        _int(gs.get("points", 401), "points"))
    cs = _section(raw, "check")
    if "conditions" in cs:
        conds = cs["conditions"]
        if not isinstance(conds, list) or any(c not in CONDITIONS for c in conds):
            raise ConfigError(f"check.conditions must be a list drawn from {CONDITIONS}")
        cfg.conditions = tuple(conds)
    if "resolution" in cs:
        cfg.resolution = _int(cs["resolution"], "resolution")
    vs = _section(raw, "verify")
    if "suite" in vs:
        suite = vs["suite"]
        if not isinstance(suite, list) or any(s not in VERIFY_SUITE for s in suite):
            raise ConfigError(f"verify.suite must be a list drawn from {VERIFY_SUITE}")
    cfg.verify = dict(vs)
    return cfg


def load_config(path):
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    return parse_config(raw)
