"""Modular integrals int F((W sigma)^e) d sigma behind the existence conditions,
with a verdict on their finiteness."""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError, RegimeError, UnsupportedMeasureError
from .measure import integrate_radial, with_multiplier
from .orlicz import F_eval_unchecked
from .wolff import DEFAULT, evaluate

CRITICAL = -1.0
MARGIN = 0.1
KINDS = ("Wp", "Wq", "WG")


@dataclass
class Verdict:
    """``tail_exponent`` is the fitted power k of the radial integrand
    F((W sigma)^e) w(r) r^(n-1) as r -> 0; the integral converges there iff k > -1."""

    value_estimate: float
    tail_exponent: float
    status: str
    breakdown: dict = field(default_factory=dict)

    @property
    def finite(self):
        return self.status == "finite"

    def to_dict(self):
        return {"breakdown": self.breakdown, "status": self.status,
                "tail_exponent": self.tail_exponent, "value_estimate": self.value_estimate}


def _status_from_exponent(k):
    if k == -math.inf:
        return "divergent"
    if abs(k - CRITICAL) <= MARGIN:
        return "inconclusive"
    return "finite" if k > CRITICAL else "divergent"


def _packed(law, kind):
    p, q = law.nf.p, law.nf.q
    if kind == "Wp":
        return np.array([p, p, 1.0])
    if kind == "Wq":
        return np.array([q, q, 1.0])
    if kind == "WG":
        return law.nf.packed(0)
    raise DomainError(f"kind must be one of {KINDS}, got {kind!r}")


def _potential(packed, sigma, pts, wolff_cfg, backend, cache):
    if cache is None:
        return evaluate(packed, sigma, pts, wolff_cfg, backend=backend).values
    key = (packed.tobytes(), pts.tobytes())
    if key not in cache:
        cache[key] = evaluate(packed, sigma, pts, wolff_cfg, backend=backend).values
    return cache[key]


def modular_of_power(law, sigma, kind, exponent, wolff_cfg=DEFAULT, resolution=1, backend=None, cache=None):
    """int F((W sigma)^e) d sigma = sum over atoms of m F(W(atom)^e)
    + n omega_n int F((W sigma(r))^e) w(r) r^(n-1) dr.

    ``cache`` (a dict) shares potential values between calls on the same
    measure and configuration that differ only in the exponent.
    """
    e = float(exponent)
    if not (math.isfinite(e) and e > 0.0):
        raise DomainError("exponent must be positive and finite")
    packed = _packed(law, kind)
    if sigma.is_zero:
        return Verdict(0.0, math.inf, "finite", {"atoms": 0.0, "density": 0.0})
    if sigma.densities and not sigma.is_radial:
        raise UnsupportedMeasureError("off-centre atoms together with a density make the potential non-radial")
    try:
        atom_sum = 0.0
        if sigma.atoms:
            pos = np.array([p for p, _ in sigma.atoms])
            w_at = _potential(packed, sigma, pos, wolff_cfg, backend, cache)
            if not np.all(np.isfinite(w_at)):
                return Verdict(math.inf, -math.inf, "divergent",
                               {"atoms": math.inf, "density": math.nan, "reason": "potential infinite at an atom"})
            atom_sum = float((sigma.atom_masses() * F_eval_unchecked(law, w_at**e)).sum())
        dens, k = 0.0, math.inf
        if sigma.densities:
            def phi(r):
                w = _potential(packed, sigma, np.ascontiguousarray(r, dtype=float), wolff_cfg, backend, cache)
                return F_eval_unchecked(law, w**e)
            dens, k = integrate_radial(sigma, phi, per_decade=4 * int(resolution), with_exponent=True)
    except RegimeError as exc:
        return Verdict(math.inf, -math.inf, "divergent", {"reason": str(exc)})
    status = _status_from_exponent(k)
    value = atom_sum + dens if status != "divergent" else math.inf
    return Verdict(value, k, status, {"atoms": atom_sum, "density": dens})


def sufficient_exponents(law):
    p, q, g = law.nf.p, law.nf.q, law.gamma
    return {
        "1/(1-gamma)": 1.0 / (1.0 - g),
        "(p-1)/(p-1-gamma(q-1))": (p - 1.0) / (p - 1.0 - g * (q - 1.0)),
        "(q-1)/(q-1-gamma(p-1))": (q - 1.0) / (q - 1.0 - g * (p - 1.0)),
    }


def _bundle(entries):
    statuses = [v.status for v in entries.values()]
    if all(s == "finite" for s in statuses):
        overall = "finite"
    elif any(s == "divergent" for s in statuses):
        overall = "divergent"
    else:
        overall = "inconclusive"
    return {"entries": {k: v.to_dict() for k, v in entries.items()}, "status": overall}


def check_sufficient(law, sigma, wolff_cfg=DEFAULT, resolution=1, backend=None):
    """The six integrals with W_p and W_q at the three exponents."""
    entries, cache = {}, {}
    for kind in ("Wp", "Wq"):
        for name, e in sufficient_exponents(law).items():
            entries[f"{kind}^{name}"] = modular_of_power(law, sigma, kind, e, wolff_cfg, resolution, backend, cache)
    return _bundle(entries)


def check_consolidated(law, sigma, wolff_cfg=DEFAULT, resolution=1, backend=None):
    """The three integrals with W_G in place of W_p and W_q."""
    entries = {f"WG^{name}": modular_of_power(law, sigma, "WG", e, wolff_cfg, resolution, backend)
               for name, e in sufficient_exponents(law).items()}
    return _bundle(entries)


def check_necessary(law, sigma, wolff_cfg=DEFAULT, resolution=1, backend=None):
    return modular_of_power(law, sigma, "WG", 1.0 / (1.0 - law.gamma), wolff_cfg, resolution, backend)


# ---------------------------------------------------------------------------
# maximal-function inequality audit


def _support_nodes(grid, radius):
    k = int(np.searchsorted(grid, radius, side="left"))
    return grid[: min(k + 1, grid.size)]


def _inequality_sides(sigma, u, r_exp, s_exp, alpha, wolff_cfg, resolution, backend):
    packed = np.array([s_exp, s_exp, 1.0])
    nodes = _support_nodes(u.radii, sigma.support_radius)
    mod = with_multiplier(sigma, nodes, u.values[: nodes.size] ** r_exp)

    def lhs_phi(r):
        return evaluate(packed, mod, r, wolff_cfg, backend=backend).values ** (1.0 + alpha)

    lhs = integrate_radial(sigma, lhs_phi, per_decade=4 * resolution) if not mod.is_zero else 0.0
    rhs_base = integrate_radial(sigma, lambda r: u(r) ** (1.0 + alpha), breakpoints=u.radii,
                                per_decade=4 * resolution)
    return lhs, rhs_base ** (r_exp / (s_exp - 1.0))


def weighted_potential_inequality_check(sigma, u, r_exp, s_exp, alpha, wolff_cfg=DEFAULT, backend=None):
    """Implied constant int (W_s(u^r d sigma))^(1+alpha) d sigma / (int u^(1+alpha) d sigma)^(r/(s-1)).

    Passes iff the prerequisite (W_s sigma)^((s-1)/(s-1-r)) in L^(1+alpha)(d sigma)
    is numerically finite and the implied constant is finite and moves by at
    most 20% when the radial quadrature is refined.
    """
    r_exp, s_exp, alpha = float(r_exp), float(s_exp), float(alpha)
    params = {"alpha": alpha, "r": r_exp, "s": s_exp}
    if not (s_exp > 1.0 and 0.0 < r_exp < s_exp - 1.0 and alpha > r_exp - 1.0):
        raise DomainError("need s > 1, 0 < r < s - 1 and alpha > r - 1")
    if sigma.atoms:
        raise UnsupportedMeasureError("the audit needs an atom-free radial measure")
    out = {"check": "weighted_potential_inequality", "params": params}
    if sigma.is_zero or u.sup() == 0.0:
        return dict(out, constant=0.0, lhs=0.0, rhs=0.0, status="finite", margin=math.inf, **{"pass": True})
    packed = np.array([s_exp, s_exp, 1.0])
    pre_e = (s_exp - 1.0) / (s_exp - 1.0 - r_exp) * (1.0 + alpha)
    try:
        pre, k = integrate_radial(
            sigma, lambda r: evaluate(packed, sigma, r, wolff_cfg, backend=backend).values ** pre_e,
            with_exponent=True)
    except RegimeError as exc:
        return dict(out, status="inconclusive", reason=str(exc), margin=-math.inf, **{"pass": False})
    pre_status = _status_from_exponent(k)
    if pre_status != "finite" or not math.isfinite(pre):
        return dict(out, status="inconclusive", prerequisite=pre, prerequisite_exponent=k,
                    margin=-math.inf, **{"pass": False})
    lhs1, rhs1 = _inequality_sides(sigma, u, r_exp, s_exp, alpha, wolff_cfg, 1, backend)
    lhs2, rhs2 = _inequality_sides(sigma, u, r_exp, s_exp, alpha, wolff_cfg, 2, backend)
    c1, c2 = lhs1 / rhs1, lhs2 / rhs2
    drift = abs(c2 / c1 - 1.0)
    ok = math.isfinite(c1) and math.isfinite(c2) and drift <= 0.2
    return dict(out, constant=c2, constant_coarse=c1, lhs=lhs2, rhs=rhs2, prerequisite=pre,
                refinement_drift=drift, status="finite" if ok else "inconclusive", margin=0.2 - drift,
                **{"pass": ok})
