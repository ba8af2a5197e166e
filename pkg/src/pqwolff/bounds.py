"""Explicit constants of the existence proof and numerical checks of the
lower bound, the lambda inequality and the two-sided potential estimates."""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError, UnsupportedMeasureError
from .measure import sphere_area, with_multiplier
from .orlicz import NFunction, gamma_admissible, gamma_upper
from .wolff import DEFAULT, RadialProfile, evaluate, wolff_radial_profile

REL_SLACK = 1e-6


# ---------------------------------------------------------------------------
# constants

LOG_TWO = math.log(2.0)


def _check_exponents(n, p, q):
    NFunction(p, q, n)  # validates 1 < p <= q, n >= 3


def log_lambda_const(n, p, q, alpha):
    """Natural log of the lambda-inequality constant; stays finite where the constant underflows."""
    _check_exponents(n, p, q)
    alpha = float(alpha)
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise DomainError("alpha must be positive")
    return (
        -math.log1p(alpha)
        + 2.0 / (p - 1.0) * math.log(p / q)
        + alpha * (q - 1.0) / (p - 1.0) ** 2 * (math.log(p / q) - (n - 1) * LOG_TWO)
    )


def lambda_const(n, p, q, alpha):
    """Constant of the lambda inequality, in (0, 1); underflows to 0.0 for p near 1 and large q."""
    return math.exp(log_lambda_const(n, p, q, alpha))


def _check_gamma(p, q, gamma):
    if not gamma_admissible(p, q, gamma):
        raise DomainError(f"gamma={gamma} not admissible for p={p}, q={q} (need 0 < gamma < {gamma_upper(p, q):.17g})")


def contraction_exponent(p, q, gamma):
    """gamma (q-1)/(p-1), the power in the c_j recursion; < 1 when gamma is admissible."""
    return gamma * (q - 1.0) / (p - 1.0)


def epsilon0(n, p, q, gamma):
    """Largest subsolution factor allowed by the proof, with lambda taken at alpha = gamma/(1-gamma)."""
    _check_exponents(n, p, q)
    _check_gamma(p, q, gamma)
    lam = lambda_const(n, p, q, gamma / (1.0 - gamma))
    base = (p / q) ** (2.0 / (p - 1.0)) * lam
    return base ** ((p - 1.0) / (p - 1.0 - gamma * (q - 1.0)))


def displayed_limit_constant(n, p, q, gamma):
    """Closed form printed for lim c_j in the source; its (p/q) exponent
    2(p-1)/((p-1)(q-1) - gamma (q-1)^2) is kept verbatim for comparison."""
    lam = lambda_const(n, p, q, gamma / (1.0 - gamma))
    e_lam = (p - 1.0) / (p - 1.0 - gamma * (q - 1.0))
    e_pq = 2.0 * (p - 1.0) / ((p - 1.0) * (q - 1.0) - gamma * (q - 1.0) ** 2)
    return lam**e_lam * (p / q) ** e_pq


@dataclass
class RecursionResult:
    delta_seq: list
    c_seq: list
    delta_limit: float
    C_star: float
    C_displayed: float
    delta_steps: int  # first j with |delta_j - limit| <= 1e-12
    c_steps: int  # first j with |c_j - C_star| <= 1e-12 C_star

    def to_dict(self):
        return {
            "C_displayed": self.C_displayed,
            "C_star": self.C_star,
            "C_mismatch_rel": self.C_displayed / self.C_star - 1.0,
            "c_final": self.c_seq[-1],
            "c_steps": self.c_steps,
            "delta_final": self.delta_seq[-1],
            "delta_limit": self.delta_limit,
            "delta_steps": self.delta_steps,
        }


def recursion_limits(n, p, q, gamma, j_max=200, c1=1.0):
    """Run delta_j = 1 + gamma delta_{j-1} and c_j = lambda (p/q)^(2/(p-1)) c_{j-1}^(gamma(q-1)/(p-1))."""
    _check_exponents(n, p, q)
    _check_gamma(p, q, gamma)
    if not c1 > 0.0:
        raise DomainError("c1 must be positive")
    lam = lambda_const(n, p, q, gamma / (1.0 - gamma))
    k = lam * (p / q) ** (2.0 / (p - 1.0))
    e = contraction_exponent(p, q, gamma)
    c_star = k ** (1.0 / (1.0 - e))
    delta_limit = 1.0 / (1.0 - gamma)
    ds, cs = [1.0], [float(c1)]
    for _ in range(1, j_max):
        ds.append(1.0 + gamma * ds[-1])
        cs.append(k * cs[-1] ** e)
    dsteps = next((j + 1 for j, d in enumerate(ds) if abs(d - delta_limit) <= 1e-12), -1)
    csteps = next((j + 1 for j, c in enumerate(cs) if abs(c - c_star) <= 1e-12 * c_star), -1)
    return RecursionResult(ds, cs, delta_limit, c_star, displayed_limit_constant(n, p, q, gamma), dsteps, csteps)


@dataclass
class ConstantsBundle:
    n: int
    p: float
    q: float
    gamma: float = None
    alpha: float = None

    def lambda_at(self, alpha):
        return lambda_const(self.n, self.p, self.q, alpha)

    def to_dict(self):
        out = {"n": self.n, "p": self.p, "q": self.q}
        if self.alpha is not None:
            out["alpha"] = self.alpha
            out["lambda"] = self.lambda_at(self.alpha)
        if self.gamma is not None:
            rec = recursion_limits(self.n, self.p, self.q, self.gamma)
            out["gamma"] = self.gamma
            out["alpha_limit"] = self.gamma / (1.0 - self.gamma)
            out["lambda_at_alpha_limit"] = self.lambda_at(self.gamma / (1.0 - self.gamma))
            out["epsilon0"] = epsilon0(self.n, self.p, self.q, self.gamma)
            out["delta_limit"] = rec.delta_limit
            out["C_recursion_limit"] = rec.C_star
            out["C_closed_form"] = rec.C_displayed
            out["C_mismatch_rel"] = rec.C_displayed / rec.C_star - 1.0
        return out


# ---------------------------------------------------------------------------
# verification reports


@dataclass
class Report:
    check: str
    params: dict
    margin: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"check": self.check, "details": self.details, "margin": self.margin,
                "params": self.params, "pass": bool(self.passed)}


def _nf_params(nf):
    return {"n": nf.n, "p": nf.p, "q": nf.q}


def verify_lower_bound(law, sigma, u, C, wolff_cfg=DEFAULT, backend=None):
    """min over the grid of u / (W_G sigma)^(1/(1-gamma)) against C (1 - 1e-6)."""
    nf = law.nf
    params = dict(_nf_params(nf), gamma=law.gamma, C=float(C))
    W = wolff_radial_profile(nf, sigma, u.radii, wolff_cfg, backend).values
    rhs = W ** (1.0 / (1.0 - law.gamma))
    pos = rhs > 0.0
    if not pos.any():
        return Report("lower_bound", params, math.inf, True, {"vacuous": True})
    ratio = u.values[pos] / rhs[pos]
    i = int(np.argmin(ratio))
    mn = float(ratio[i])
    margin = mn / C - 1.0
    return Report("lower_bound", params, margin, mn >= C * (1.0 - REL_SLACK),
                  {"min_ratio": mn, "argmin_r": float(u.radii[pos][i]), "vacuous": False})


def _support_nodes(grid, radius):
    k = int(np.searchsorted(grid, radius, side="left"))
    return grid[: min(k + 1, grid.size)]


def verify_lambda_inequality(nf, sigma, alpha, grid, wolff_cfg=DEFAULT, backend=None):
    """W_G(phi(W_G sigma) d sigma) >= lambda (W_G sigma)^(1+alpha), phi(t) = g(t^alpha)."""
    lam = lambda_const(nf.n, nf.p, nf.q, alpha)
    params = dict(_nf_params(nf), alpha=float(alpha), **{"lambda": lam})
    if sigma.atoms:
        raise UnsupportedMeasureError("the lambda inequality check needs an atom-free measure")
    grid = np.asarray(grid, dtype=float)
    W = wolff_radial_profile(nf, sigma, grid, wolff_cfg, backend)
    if sigma.is_zero or W.sup() == 0.0:
        return Report("lambda_inequality", params, math.inf, True, {"vacuous": True})
    if grid[-1] < sigma.support_radius:
        raise DomainError("grid must reach the support radius of sigma")
    nodes = _support_nodes(grid, sigma.support_radius)
    phi = nf.g(W.values[: nodes.size] ** alpha)
    mod = with_multiplier(sigma, nodes, phi)
    lhs = wolff_radial_profile(nf, mod, grid, wolff_cfg, backend).values
    rhs = W.values ** (1.0 + alpha)
    ratio = lhs / rhs
    i = int(np.argmin(ratio))
    mn = float(ratio[i])
    return Report("lambda_inequality", params, mn / lam - 1.0, mn >= lam * (1.0 - REL_SLACK),
                  {"argmin_r": float(grid[i]), "max_ratio": float(ratio.max()), "min_ratio": mn, "vacuous": False})


def sandwich_envelope(nf):
    """[k_lo, k_hi] bounding W_{G, n omega_n} / W_{G, 1} from the scaling of g^{-1} at alpha = 1/(n omega_n)."""
    p, q = nf.p, nf.q
    a = 1.0 / sphere_area(nf.n)
    lo = (p / q) ** (1.0 / (p - 1.0)) * min(a ** (1.0 / (p - 1.0)), a ** (1.0 / (q - 1.0)))
    hi = (q / p) ** (1.0 / (p - 1.0)) * max(a ** (1.0 / (p - 1.0)), a ** (1.0 / (q - 1.0)))
    return lo, hi


def verify_sandwich(nf, mu, grid, wolff_cfg=DEFAULT, backend=None):
    """Ratio of the exact radial solution W_{G, n omega_n} mu to W_G mu on a grid."""
    lo, hi = sandwich_envelope(nf)
    params = dict(_nf_params(nf), k_lo=lo, k_hi=hi)
    u = wolff_radial_profile(nf, mu, grid, wolff_cfg.with_(A="n_omega_n"), backend).values
    W = wolff_radial_profile(nf, mu, grid, wolff_cfg.with_(A=1.0), backend).values
    pos = W > 0.0
    if not pos.any():
        return Report("sandwich", params, math.inf, True, {"vacuous": True})
    ratio = u[pos] / W[pos]
    rmin, rmax = float(ratio.min()), float(ratio.max())
    margin = min(rmin / lo - 1.0, 1.0 - rmax / hi)
    ok = rmin >= lo * (1.0 - REL_SLACK) and rmax <= hi * (1.0 + REL_SLACK)
    return Report("sandwich", params, margin, ok, {"max_ratio": rmax, "min_ratio": rmin, "vacuous": False})


def verify_truncated_center_bound(nf, mu, R_list, wolff_cfg=DEFAULT, x0_radius=0.0, bound=1e3, backend=None):
    """Uniform-in-R boundedness of the two one-sided ratios of the local estimate

        W_G^R mu(x0) / u(x0)   and   u(x0) / (inf_{B(x0,R)} u + W_G^R mu(x0)),

    u the exact radial solution.  inf over B(x0, R) of the radially decreasing
    u is u(|x0| + R).  Passes iff both sups are finite and at most ``bound``.
    """
    Rs = [float(r) for r in R_list]
    params = dict(_nf_params(nf), R_list=Rs, bound=bound, x0_radius=float(x0_radius))
    if mu.is_zero:
        return Report("truncated_center_bound", params, math.inf, True, {"vacuous": True})
    if not mu.is_radial:
        raise DomainError("the center-bound check needs a radial measure")
    exact = wolff_cfg.with_(A="n_omega_n", R=math.inf)
    packed = nf.packed(0)
    pts = np.array([float(x0_radius)] + [x0_radius + r for r in Rs])
    uvals = evaluate(packed, mu, pts, exact, backend=backend).values
    u0 = float(uvals[0])
    if not math.isfinite(u0):
        return Report("truncated_center_bound", params, -math.inf, False, {"u_x0": u0, "reason": "u(x0) infinite"})
    wr = [float(evaluate(packed, mu, pts[:1], wolff_cfg.with_(A=1.0, R=r), backend=backend).values[0]) for r in Rs]
    lower = [w / u0 for w in wr]
    upper = [u0 / (float(ui) + w) if float(ui) + w > 0.0 else math.inf for ui, w in zip(uvals[1:], wr)]
    s_lo, s_up = max(lower), max(upper)
    ok = math.isfinite(s_lo) and math.isfinite(s_up) and s_lo <= bound and s_up <= bound
    margin = 1.0 - max(s_lo, s_up) / bound
    positive = [v for v in lower if v > 0.0]
    spread = max(positive) / min(positive) if positive else math.inf
    return Report("truncated_center_bound", params, margin, ok,
                  {"lower_ratios": lower, "upper_ratios": upper, "u_x0": u0, "W_R": wr,
                   "lower_ratio_spread": spread, "vacuous": False})
