"""Nonnegative measures on R^n: finitely many atoms plus radial densities about the origin."""

from dataclasses import dataclass, replace
from functools import cached_property
import math

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline
from scipy.special import gamma as gamma_fn

from . import _kernels as K
from .errors import DomainError

KINDS = {"constant": 0, "power": 1, "gaussian": 2}


def sphere_area(n):
    """Surface area n * omega_n of the unit sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / gamma_fn(n / 2.0)


@dataclass(frozen=True)
class Multiplier:
    """Cubic spline in log r multiplying a density.

    ``logmode`` True means the spline models log of the multiplier.  Below the
    first knot the multiplier is held at its first-knot value.
    """

    knots: tuple
    coefs: tuple  # (m-1) rows of 4 coefficients, lowest order first
    logmode: bool = True

    @classmethod
    def from_samples(cls, radii, values):
        """Log-log cubic (not-a-knot) spline through positive samples, or a
        linear-in-value spline when some samples vanish."""
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        if radii.ndim != 1 or radii.size < 2 or np.any(np.diff(radii) <= 0.0) or radii[0] <= 0.0:
            raise DomainError("multiplier radii must be positive and strictly increasing")
        if np.any(values < 0.0) or not np.all(np.isfinite(values)):
            raise DomainError("multiplier values must be finite and nonnegative")
        x = np.log(radii)
        logmode = bool(np.all(values > 0.0))
        y = np.log(values) if logmode else values
        if radii.size == 2:
            sl = (y[1] - y[0]) / (x[1] - x[0])
            coefs = ((y[0], sl, 0.0, 0.0),)
        else:
            cs = CubicSpline(x, y, bc_type="not-a-knot")
            coefs = tuple(tuple(float(v) for v in col[::-1]) for col in cs.c.T)
        return cls(tuple(float(v) for v in x), coefs, logmode)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        x = np.log(np.maximum(r, 1e-300))
        sx = np.asarray(self.knots)
        sc = np.asarray(self.coefs)
        v = K._spline_eval_np(x, sx, sc, sx.size)
        return np.exp(v) if self.logmode else np.maximum(v, 0.0)


@dataclass(frozen=True)
class RadialDensity:
    """Density w(r) on the ball of radius ``radius`` about the origin.

    kind "constant": c;  "power": c r^(-s) with s < n;
    "gaussian": c exp(-r^2 / (2 width^2)).  An optional multiplier rescales w.
    """

    kind: str
    radius: float
    c: float = 1.0
    s: float = 0.0
    width: float = 1.0
    multiplier: Multiplier = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown density kind {self.kind!r}")
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise DomainError("density support radius must be positive and finite")
        if not (math.isfinite(self.c) and self.c >= 0.0):
            raise DomainError("density coefficient must be finite and nonnegative")
        if self.kind == "gaussian" and not self.width > 0.0:
            raise DomainError("gaussian width must be positive")
        if self.kind == "power" and not math.isfinite(self.s):
            raise DomainError("power exponent must be finite")

    def shape_param(self):
        return {"constant": 0.0, "power": self.s, "gaussian": self.width}[self.kind]

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        rr = np.where((r > 0.0) & (r < self.radius), r, 1.0)
        if self.kind == "constant":
            w = np.full(rr.shape, self.c)
        elif self.kind == "power":
            w = self.c * rr ** (-self.s)
        else:
            w = self.c * np.exp(-0.5 * (rr / self.width) ** 2)
        if self.multiplier is not None:
            w = w * self.multiplier(rr)
        return np.where((r > 0.0) & (r < self.radius), w, 0.0)

    def scaled(self, factor):
        return replace(self, c=self.c * factor)


def _atom_tuple(pos, mass, n):
    pos = np.asarray(pos, dtype=float).reshape(-1)
    if pos.size != n:
        raise DomainError(f"atom position has dimension {pos.size}, expected {n}")
    if not np.all(np.isfinite(pos)):
        raise DomainError("atom position must be finite")
    mass = float(mass)
    if not (math.isfinite(mass) and mass > 0.0):
        raise DomainError("atom masses must be positive and finite")
    return tuple(float(v) for v in pos), mass


@dataclass(frozen=True)
class Measure:
    """Atoms ((position, mass), ...) plus radial density components, in R^n."""

    n: int
    atoms: tuple = ()
    densities: tuple = ()

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"bad dimension {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "atoms", tuple(_atom_tuple(p, m, self.n) for p, m in self.atoms))
        dens = tuple(self.densities)
        for d in dens:
            if not isinstance(d, RadialDensity):
                raise DomainError("densities must be RadialDensity instances")
            if d.kind == "power" and d.s >= self.n:
                raise DomainError(f"power density needs s < n, got s={d.s}")
        # components with c == 0 carry no mass
        object.__setattr__(self, "densities", tuple(d for d in dens if d.c > 0.0))

    # constructors
    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def atom(cls, n, mass=1.0, position=None):
        position = np.zeros(n) if position is None else position
        return cls(n, atoms=((position, mass),))

    @classmethod
    def uniform_ball(cls, n, radius=1.0, c=1.0):
        return cls(n, densities=(RadialDensity("constant", radius, c),))

    @classmethod
    def power_ball(cls, n, radius=1.0, c=1.0, s=0.0):
        return cls(n, densities=(RadialDensity("power", radius, c, s=s),))

    @classmethod
    def gaussian_ball(cls, n, radius=1.0, c=1.0, width=1.0):
        return cls(n, densities=(RadialDensity("gaussian", radius, c, width=width),))

    # structure
    @property
    def is_zero(self):
        return not self.atoms and not self.densities

    @property
    def is_radial(self):
        return all(not any(p) for p, _ in self.atoms)

    @property
    def support_radius(self):
        r = [math.hypot(*p) for p, _ in self.atoms] + [d.radius for d in self.densities]
        return max(r) if r else 0.0

    def density(self, r):
        """Sum of the density components at radius r."""
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        for d in self.densities:
            out = out + d(r)
        return out

    @cached_property
    def compiled(self):
        """Packed arrays consumed by the kernels, built once per measure."""
        return _compile(self)

    @property
    def total_mass(self):
        c = self.compiled
        dens = float(c["cm"][:, -1].sum()) if c["cm"].shape[0] else 0.0
        return sum(m for _, m in self.atoms) + dens

    def atom_distances(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        if not self.atoms:
            return np.empty(0)
        pos = np.array([p for p, _ in self.atoms])
        return np.sqrt(((pos - x[None, :]) ** 2).sum(axis=1))

    def atom_masses(self):
        return np.array([m for _, m in self.atoms], dtype=float)

    def _point(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size == 1 and self.n != 1:
            # a bare radius means the point (r, 0, ..., 0)
            x = np.concatenate([x, np.zeros(self.n - 1)])
        if x.size != self.n:
            raise DomainError(f"point has dimension {x.size}, expected {self.n}")
        return x

    def ball_mass(self, x, t):
        """Mass of the open ball B(x, t); t may be an array."""
        ta = np.asarray(t, dtype=float)
        if np.any(~(ta > 0.0)) or not np.all(np.isfinite(ta)):
            raise DomainError("ball radius must be positive and finite")
        x = self._point(x)
        c = self.compiled
        rho = float(np.sqrt((x * x).sum()))
        tt = np.atleast_1d(ta)
        out = K.ball_mass_atoms_np(tt, self.atom_distances(x), self.atom_masses())
        if self.densities:
            out = out + K.ball_mass_density_np(rho, tt, c["dpar"], c["sx"], c["sc"], c["cx"], c["cm"],
                                               self.n, c["snc"])
        return float(out[0]) if ta.ndim == 0 else out

    def cumulative_mass(self, r):
        """Mass of the open ball B(0, r) (atoms plus densities)."""
        return self.ball_mass(np.zeros(self.n), r)


def _compile(m):
    k = len(m.densities)
    snc = sphere_area(m.n)
    mmax = max([len(d.multiplier.knots) for d in m.densities if d.multiplier is not None] + [1])
    dpar = np.zeros((k, 6))
    sx = np.zeros((k, mmax))
    sc = np.zeros((k, max(mmax - 1, 1), 4))
    for j, d in enumerate(m.densities):
        mult = d.multiplier
        nk = 0 if mult is None else len(mult.knots)
        dpar[j] = (d.radius, KINDS[d.kind], d.c, d.shape_param(), 1.0 if (mult and mult.logmode) else 0.0, nk)
        if nk:
            sx[j, :nk] = mult.knots
            sc[j, :nk - 1] = mult.coefs
    if k:
        tabs = [K.build_cumulative_table(dpar, sx, sc, j, m.n, snc) for j in range(k)]
        cx = np.array([t[0] for t in tabs])
        cm = np.array([t[1] for t in tabs])
    else:
        cx = np.zeros((0, 1))
        cm = np.zeros((0, 1))
    return {"dpar": dpar, "sx": sx, "sc": sc, "cx": cx, "cm": cm, "snc": snc}


# ---------------------------------------------------------------------------
# geometry and measure algebra


def shell_cap_fraction(rho, r, t, n, method="exact"):
    """Fraction of the sphere |y| = r lying in the open ball B(x, t), |x| = rho.

    ``method="exact"`` uses the closed form (n = 3) or the sin-power reduction
    formula; ``method="quadrature"`` integrates sin^(n-2) numerically.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"bad dimension {n}")
    if rho < 0.0 or not r > 0.0 or not t > 0.0:
        raise DomainError("need rho >= 0, r > 0, t > 0")
    if method == "exact":
        return float(K.capfrac_np(float(rho), np.array([float(r)]), np.array([float(t)]), int(n))[0])
    if method != "quadrature":
        raise DomainError(f"unknown method {method!r}")
    if rho == 0.0:
        # the whole sphere sits at distance r; the open ball excludes it when r = t
        return 1.0 if r < t else 0.0
    if r + rho <= t:
        return 1.0
    if abs(rho - r) >= t:
        return 0.0
    cosv = min(1.0, max(-1.0, (rho * rho + r * r - t * t) / (2.0 * rho * r)))
    theta = math.acos(cosv)
    fn = lambda u: math.sin(u) ** (n - 2)  # noqa: E731
    num = integrate.quad(fn, 0.0, theta, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    den = integrate.quad(fn, 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return min(1.0, max(0.0, num / den))


def with_density_scaled(m, factor):
    """The measure factor * m (atoms and densities alike)."""
    factor = float(factor)
    if not (math.isfinite(factor) and factor > 0.0):
        raise DomainError("scale factor must be positive and finite")
    return Measure(m.n, tuple((p, w * factor) for p, w in m.atoms), tuple(d.scaled(factor) for d in m.densities))


def plus_measure(m1, m2):
    if m1.n != m2.n:
        raise DomainError(f"dimension mismatch: {m1.n} vs {m2.n}")
    return Measure(m1.n, m1.atoms + m2.atoms, m1.densities + m2.densities)


def restrict_to_ball(m, radius):
    """Restriction of m to the open ball B(0, radius)."""
    radius = float(radius)
    if not radius > 0.0:
        raise DomainError("restriction radius must be positive")
    atoms = tuple((p, w) for p, w in m.atoms if math.hypot(*p) < radius)
    dens = tuple(replace(d, radius=min(d.radius, radius)) for d in m.densities)
    return Measure(m.n, atoms, dens)


def with_multiplier(m, radii, values):
    """Radial measure whose density components are multiplied by a spline through
    (radii, values).  Atoms are not allowed."""
    if m.atoms:
        raise DomainError("cannot attach a multiplier to a measure with atoms")
    vals = np.asarray(values, dtype=float)
    if np.all(vals == 0.0):
        return Measure(m.n)
    dens = []
    for d in m.densities:
        if d.multiplier is not None:
            raise DomainError("density already carries a multiplier")
        dens.append(replace(d, multiplier=Multiplier.from_samples(radii, vals)))
    return Measure(m.n, (), tuple(dens))


_GL8 = np.polynomial.legendre.leggauss(8)


def integrate_radial(m, phi, breakpoints=(), decades=12.0, per_decade=4, with_exponent=False):
    """sum over density components of n omega_n int_0^R phi(r) w(r) r^(n-1) dr.

    Gauss-Legendre panels in log r between ``breakpoints`` (and at least
    ``per_decade`` panels per decade) down to 10^-decades R; the piece below
    is closed with the local power law r^k of the integrand.  Atoms are
    ignored.  With ``with_exponent`` the smallest fitted k is returned too
    (the integral near 0 converges iff k > -1).
    """
    snc = sphere_area(m.n)
    xg, wg = _GL8
    total = 0.0
    kmin = math.inf
    for d in m.densities:
        R = d.radius
        lo = R * 10.0 ** (-decades)
        bp = np.asarray(breakpoints, dtype=float)
        bp = bp[(bp > lo) & (bp < R)]
        edges = np.unique(np.concatenate([np.log(np.array([lo, R])), np.log(bp),
                                          np.linspace(math.log(lo), math.log(R), int(decades * per_decade) + 1)]))
        a, h = edges[:-1], np.diff(edges)
        x = a[:, None] + 0.5 * h[:, None] * (xg[None, :] + 1.0)
        r = np.minimum(np.exp(x), np.nextafter(R, 0.0))
        vals = np.asarray(phi(r.ravel()), dtype=float).reshape(r.shape) * d(r) * r**m.n
        total += snc * float((0.5 * h[:, None] * vals * wg[None, :]).sum())
        # head below lo: integrand ~ r^k, fitted from lo and 2 lo
        h1, h2 = (np.asarray(phi(np.array([lo, 2 * lo])), dtype=float) * d(np.array([lo, 2 * lo]))
                  * np.array([lo, 2 * lo]) ** (m.n - 1))
        if h1 > 0.0 and h2 > 0.0 and math.isfinite(h1) and math.isfinite(h2):
            k = math.log(h2 / h1) / math.log(2.0)
            kmin = min(kmin, k)
            total += snc * (lo * h1 / (1.0 + k) if k > -1.0 else math.inf)
        elif not (math.isfinite(h1) and math.isfinite(h2)):
            kmin = -math.inf
            total = math.inf
    return (total, kmin) if with_exponent else total
