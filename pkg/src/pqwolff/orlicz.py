"""The model N-function g(t) = t^(p-1) + t^(q-1) and its relatives.

All evaluators accept a scalar or an array, reject negative or non-finite
arguments with :class:`DomainError`, and return a float for scalar input.
"""

from dataclasses import dataclass
import math

import numpy as np

from ._kernels import ginv_np
from .errors import DomainError


@dataclass(frozen=True)
class NFunction:
    """Exponent pair (p, q) and the space dimension n."""

    p: float
    q: float
    n: int = 3

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not (math.isfinite(p) and math.isfinite(q)) or not 1.0 < p <= q:
            raise DomainError(f"need 1 < p <= q, got p={self.p}, q={self.q}")
        if int(self.n) != self.n or self.n < 3:
            raise DomainError(f"need an integer dimension n >= 3, got {self.n}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "n", int(self.n))

    @property
    def homogeneous(self):
        return self.p == self.q

    def packed(self, mode=0):
        return np.array([self.p, self.q, float(mode)])

    def g(self, t):
        return g_eval(self, t)

    def G(self, t):
        return G_eval(self, t)

    def g_inv(self, s):
        return g_inv(self, s)

    def G_star(self, s):
        return G_star(self, s)


@dataclass(frozen=True)
class SublinearLaw:
    """The nonlinearity f(t) = g(t^gamma) attached to an N-function."""

    gamma: float
    nf: NFunction

    def __post_init__(self):
        if not gamma_admissible(self.nf.p, self.nf.q, self.gamma):
            raise DomainError(
                f"gamma={self.gamma} is not admissible for p={self.nf.p}, q={self.nf.q}; "
                f"need 0 < gamma < {gamma_upper(self.nf.p, self.nf.q):.17g}"
            )
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def exponents(self):
        """Growth exponents (p-1) gamma and (q-1) gamma of f."""
        return (self.nf.p - 1.0) * self.gamma, (self.nf.q - 1.0) * self.gamma

    def f(self, t):
        return f_eval(self, t)

    def F(self, t):
        return F_eval(self, t)


def _arg(t, name="t"):
    a = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be finite")
    if np.any(a < 0.0):
        raise DomainError(f"{name} must be nonnegative")
    return a


def _out(a, like):
    return float(a) if np.ndim(like) == 0 else a


def _pow(t, e):
    # t^e with 0^e = 0 for the positive exponents used here
    return np.where(t > 0.0, np.power(np.where(t > 0.0, t, 1.0), e), 0.0)


def g_eval(nf, t):
    a = _arg(t)
    return _out(_pow(a, nf.p - 1.0) + _pow(a, nf.q - 1.0), t)


def G_eval(nf, t):
    a = _arg(t)
    return _out(_pow(a, nf.p) / nf.p + _pow(a, nf.q) / nf.q, t)


def g_inv(nf, s):
    """Unique t >= 0 with g(t) = s (safeguarded Newton in log t; closed form when p = q)."""
    a = _arg(s, "s")
    return _out(ginv_np(a, nf.p, nf.q, 0), s)


def G_star(nf, s):
    """Convex conjugate sup_t {s t - G(t)}, through the equality case of Young's inequality.

    With y = g^{-1}(s), s y - G(y) = (1 - 1/p) y^p + (1 - 1/q) y^q, which is
    summed directly to avoid the cancellation in the difference.
    """
    a = _arg(s, "s")
    y = ginv_np(a, nf.p, nf.q, 0)
    return _out((1.0 - 1.0 / nf.p) * _pow(y, nf.p) + (1.0 - 1.0 / nf.q) * _pow(y, nf.q), s)


def f_eval(law, t):
    a = _arg(t)
    e1, e2 = law.exponents
    return _out(_pow(a, e1) + _pow(a, e2), t)


def F_eval(law, t):
    a = _arg(t)
    e1, e2 = law.exponents
    return _out(_pow(a, e1 + 1.0) / (e1 + 1.0) + _pow(a, e2 + 1.0) / (e2 + 1.0), t)


def F_eval_unchecked(law, t):
    """F on an array that may contain +inf (mapped to +inf)."""
    e1, e2 = law.exponents
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore"):
        return _pow(t, e1 + 1.0) / (e1 + 1.0) + _pow(t, e2 + 1.0) / (e2 + 1.0)


def gamma_upper(p, q):
    """Supremum of admissible gamma; the second bound is absent when p = q."""
    if p == q:
        return 1.0
    return min((p - 1.0) / (q - 1.0), 1.0 / (q - p))


def gamma_admissible(p, q, gamma):
    try:
        gamma = float(gamma)
    except (TypeError, ValueError):
        return False
    return math.isfinite(gamma) and 0.0 < gamma < gamma_upper(float(p), float(q))


# ---------------------------------------------------------------------------
# growth envelopes

ENVELOPE_FAMILIES = (
    "g_scaling",
    "G_scaling",
    "g_inv_scaling",
    "G_star_scaling",
    "g_inv_sum_bound",
    "conjugate_sandwich",
    "submultiplicativity",
)


@dataclass
class EnvelopeReport:
    worst_slack: dict
    worst_sample: dict
    n_samples: int
    tol: float = 1e-9

    @property
    def passed(self):
        return all(v >= -self.tol for v in self.worst_slack.values())

    def to_dict(self):
        return {
            "n_samples": self.n_samples,
            "pass": self.passed,
            "tol": self.tol,
            "worst_sample": {k: list(v) if v is not None else None for k, v in self.worst_sample.items()},
            "worst_slack": dict(self.worst_slack),
        }


def _slack(lo, hi):
    """Relative slack of lo <= hi; negative when violated."""
    scale = np.maximum(np.abs(lo), np.abs(hi))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (hi - lo) / scale
    return np.where(scale > 0.0, r, 0.0)


def envelope_slacks(nf, t, alpha):
    """Per-family arrays of signed relative slack (both sides of each two-sided bound)."""
    p, q = nf.p, nf.q
    t = _arg(t)
    alpha = _arg(alpha, "alpha")
    pw = lambda x, e: _pow(x, e)  # noqa: E731

    def two_sided(lo, mid, hi):
        return np.minimum(_slack(lo, mid), _slack(mid, hi))

    gt, gat = g_eval(nf, t), g_eval(nf, alpha * t)
    lo_g = np.minimum(pw(alpha, p - 1), pw(alpha, q - 1))
    hi_g = np.maximum(pw(alpha, p - 1), pw(alpha, q - 1))
    out = {"g_scaling": two_sided(lo_g * gt, gat, hi_g * gt)}

    Gt, Gat = G_eval(nf, t), G_eval(nf, alpha * t)
    out["G_scaling"] = two_sided(np.minimum(pw(alpha, p), pw(alpha, q)) * Gt, Gat,
                                 np.maximum(pw(alpha, p), pw(alpha, q)) * Gt)

    it, iat = g_inv(nf, t), g_inv(nf, alpha * t)
    a1, a2 = pw(alpha, 1 / (p - 1)), pw(alpha, 1 / (q - 1))
    out["g_inv_scaling"] = two_sided((p / q) ** (1 / (p - 1)) * np.minimum(a1, a2) * it, iat,
                                     (q / p) ** (1 / (p - 1)) * np.maximum(a1, a2) * it)

    st, sat = G_star(nf, t), G_star(nf, alpha * t)
    b1, b2 = pw(alpha, p / (p - 1)), pw(alpha, q / (q - 1))
    out["G_star_scaling"] = two_sided(np.minimum(b1, b2) * st, sat, np.maximum(b1, b2) * st)

    c = g_inv(nf, 1.0)
    bound = c * (q / p) ** (1 / (p - 1)) * (pw(t, 1 / (p - 1)) + pw(t, 1 / (q - 1)))
    out["g_inv_sum_bound"] = _slack(it, bound)

    conj = G_star(nf, gt)
    out["conjugate_sandwich"] = two_sided((p - 1) * Gt, conj, (q - 1) * Gt)

    # g(ab) <= g(a) g(b) and g^{-1}(ab) >= g^{-1}(a) g^{-1}(b), with a = t, b = alpha
    s1 = _slack(gat, gt * g_eval(nf, alpha))
    s2 = _slack(it * g_inv(nf, alpha), iat)
    out["submultiplicativity"] = np.minimum(s1, s2)
    return out


def check_growth_envelopes(nf, samples, tol=1e-9):
    """Worst signed relative slack of every growth-envelope family over (t, alpha) samples."""
    arr = np.asarray(samples, dtype=float).reshape(-1, 2)
    if arr.shape[0] and (np.any(arr[:, 0] <= 0.0) or np.any(arr[:, 1] < 0.0)):
        raise DomainError("samples need t > 0 and alpha >= 0")
    worst = {k: 0.0 for k in ENVELOPE_FAMILIES}
    where = {k: None for k in ENVELOPE_FAMILIES}
    if arr.shape[0]:
        slacks = envelope_slacks(nf, arr[:, 0], arr[:, 1])
        for k in ENVELOPE_FAMILIES:
            i = int(np.argmin(slacks[k]))
            worst[k] = float(slacks[k][i])
            where[k] = (float(arr[i, 0]), float(arr[i, 1]))
    return EnvelopeReport(worst, where, int(arr.shape[0]), tol)


def delta2_ratio(nf, t):
    """t g(t) / G(t), which lies in [p, q]."""
    a = _arg(t)
    if np.any(a <= 0.0):
        raise DomainError("t must be positive")
    return _out(np.asarray(g_eval(nf, a)) * a / np.asarray(G_eval(nf, a)), t)
