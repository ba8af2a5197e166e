"""Generalized Wolff potentials

    W_{G,A}^R sigma(x) = int_0^R g^{-1}( sigma(B(x,t)) / (A t^(n-1)) ) dt

for the unit normalization (A = 1), the exact radial solution
operator (A = n omega_n), truncations at finite R and the classical W_p.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import _kernels as K
from ._accel import resolve_backend
from .errors import DomainError, RegimeError
from .measure import sphere_area

TAIL_MODES = ("analytic-power", "hard-cutoff")


@dataclass(frozen=True)
class WolffConfig:
    """Normalization A (a number or "n_omega_n"), truncation radius R and tolerances."""

    A: object = 1.0
    R: float = math.inf
    rel_tol: float = 1e-10
    max_refinement_depth: int = 8
    tail_mode: str = "analytic-power"

    def __post_init__(self):
        if isinstance(self.A, str):
            if self.A != "n_omega_n":
                raise DomainError(f"A must be positive or 'n_omega_n', got {self.A!r}")
        elif not (math.isfinite(float(self.A)) and float(self.A) > 0.0):
            raise DomainError("A must be positive and finite")
        R = float(self.R)
        if not R > 0.0:
            raise DomainError("R must be positive (or inf)")
        object.__setattr__(self, "R", R)
        if not 0.0 < self.rel_tol <= 1e-2:
            raise DomainError("rel_tol must lie in (0, 1e-2]")
        if int(self.max_refinement_depth) < 1:
            raise DomainError("max_refinement_depth must be at least 1")
        if self.tail_mode not in TAIL_MODES:
            raise DomainError(f"tail_mode must be one of {TAIL_MODES}")

    def normalization(self, n):
        return sphere_area(n) if self.A == "n_omega_n" else float(self.A)

    def with_(self, **kw):
        d = {k: getattr(self, k) for k in ("A", "R", "rel_tol", "max_refinement_depth", "tail_mode")}
        d.update(kw)
        return WolffConfig(**d)


DEFAULT = WolffConfig()


# ---------------------------------------------------------------------------
# radial profiles


class RadialProfile:
    """Nonnegative function of radius sampled on an increasing positive grid.

    Interpolation is linear in (log r, log u); segments touching a zero value
    fall back to linear in u.  Beyond the last node the profile continues as the
    power law through the last two nodes; below the first node it is constant.
    """

    def __init__(self, radii, values):
        r = np.array(radii, dtype=float).reshape(-1)
        v = np.array(values, dtype=float).reshape(-1)
        if r.size == 0 or r.size != v.size:
            raise DomainError("radii and values must be nonempty and of equal length")
        if r[0] <= 0.0 or np.any(np.diff(r) <= 0.0):
            raise DomainError("radii must be positive and strictly increasing")
        if np.any(v < 0.0) or not np.all(np.isfinite(v)):
            raise DomainError("profile values must be finite and nonnegative")
        self.radii = r
        self.values = v
        self.radii.flags.writeable = False
        self.values.flags.writeable = False
        self.tail_exponent = 0.0
        if r.size >= 2 and v[-1] > 0.0 and v[-2] > 0.0:
            self.tail_exponent = math.log(v[-1] / v[-2]) / math.log(r[-1] / r[-2])

    def __len__(self):
        return self.radii.size

    def __repr__(self):
        return f"RadialProfile({self.radii.size} pts, r in [{self.radii[0]:.3g}, {self.radii[-1]:.3g}])"

    def __call__(self, r):
        ra = np.asarray(r, dtype=float)
        x = np.atleast_1d(ra)
        rr, vv = self.radii, self.values
        out = np.empty(x.shape)
        lo = x <= rr[0]
        hi = x >= rr[-1]
        out[lo] = vv[0]
        if vv[-1] > 0.0:
            out[hi] = vv[-1] * (x[hi] / rr[-1]) ** self.tail_exponent
        else:
            out[hi] = 0.0
        mid = ~(lo | hi)
        if mid.any():
            xm = x[mid]
            k = np.clip(np.searchsorted(rr, xm, side="right") - 1, 0, rr.size - 2)
            r0, r1, v0, v1 = rr[k], rr[k + 1], vv[k], vv[k + 1]
            w = np.log(xm / r0) / np.log(r1 / r0)
            pos = (v0 > 0.0) & (v1 > 0.0)
            with np.errstate(divide="ignore"):
                loglog = np.exp((1.0 - w) * np.log(np.where(pos, v0, 1.0)) + w * np.log(np.where(pos, v1, 1.0)))
            out[mid] = np.where(pos, loglog, (1.0 - w) * v0 + w * v1)
        return float(out[0]) if ra.ndim == 0 else out

    def sup(self):
        return float(self.values.max())

    def map(self, fn):
        return RadialProfile(self.radii, fn(self.values))

    def to_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write(profile_csv_text(self))

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1])


def profile_csv_text(profile):
    lines = ["r,value"]
    lines += [f"{r:.17g},{v:.17g}" for r, v in zip(profile.radii, profile.values)]
    return "\n".join(lines) + "\n"


def log_grid(r_min=1e-4, r_max=1e4, points=400):
    if not (0.0 < r_min < r_max) or points < 2:
        raise DomainError("grid needs 0 < r_min < r_max and at least 2 points")
    return np.logspace(math.log10(r_min), math.log10(r_max), int(points))


# ---------------------------------------------------------------------------
# evaluation


@dataclass
class WolffValues:
    values: np.ndarray
    errors: np.ndarray
    levels: np.ndarray


def _check_regime(p_eff, n, R):
    if R == math.inf and p_eff >= n:
        raise RegimeError(
            f"the untruncated potential diverges for p >= n (p={p_eff:g}, n={n}); "
            "only the trivial solution exists in this regime"
        )


def evaluate(packed_nf, measure, points, cfg=DEFAULT, levels=None, adapt=True, backend=None):
    """Potential at each point of ``points`` (array npts x n, or radii on the first axis).

    ``levels`` gives the starting quadrature level per point; with ``adapt``
    the level is raised until successive values agree to cfg.rel_tol.
    """
    backend = resolve_backend(backend)
    n = measure.n
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = np.concatenate([pts[:, None], np.zeros((pts.size, n - 1))], axis=1)
    if pts.ndim != 2 or pts.shape[1] != n:
        raise DomainError(f"points must have dimension {n}")
    p_eff = packed_nf[0]
    _check_regime(p_eff, n, cfg.R)
    npts = pts.shape[0]
    rhos = np.sqrt((pts * pts).sum(axis=1))
    am = measure.atom_masses() if measure.atoms else np.empty(0)
    ads = np.array([measure.atom_distances(x) for x in pts]) if measure.atoms else np.empty((npts, 0))
    c = measure.compiled
    big_a = cfg.normalization(n)
    mtot = measure.total_mass if cfg.tail_mode == "analytic-power" else 0.0
    lev = np.ones(npts, dtype=np.int64) if levels is None else np.asarray(levels, dtype=np.int64).copy()
    fn = K.wolff_profile_scalar if backend == "numba" else K.wolff_profile_np
    vals, errs, used = fn(rhos, ads, am, c["dpar"], c["sx"], c["sc"], c["cx"], c["cm"], n, c["snc"],
                          np.asarray(packed_nf, dtype=float), big_a, cfg.R, mtot, lev, cfg.rel_tol,
                          int(cfg.max_refinement_depth), bool(adapt))
    return WolffValues(vals, errs, used)


def _point(measure, x):
    return measure._point(x)[None, :]


def wolff_point(nf, measure, x, cfg=DEFAULT, backend=None):
    """W_{G,A}^R sigma(x); +inf when an atom at x makes it diverge."""
    _same_dim(nf, measure)
    return float(evaluate(nf.packed(0), measure, _point(measure, x), cfg, backend=backend).values[0])


def wolff_p_point(p, n, measure, x, cfg=DEFAULT, backend=None):
    """Classical Wolff potential with g^{-1}(s) = s^(1/(p-1))."""
    p = float(p)
    if not p > 1.0:
        raise DomainError("need p > 1")
    if measure.n != n:
        raise DomainError(f"measure lives in R^{measure.n}, not R^{n}")
    packed = np.array([p, p, 1.0])
    return float(evaluate(packed, measure, _point(measure, x), cfg, backend=backend).values[0])


def _same_dim(nf, measure):
    if nf.n != measure.n:
        raise DomainError(f"N-function dimension {nf.n} differs from measure dimension {measure.n}")


def _radial_grid(measure, grid):
    if not measure.is_radial:
        raise DomainError("radial profiles need a radial measure (atoms at the origin only)")
    g = np.asarray(grid, dtype=float).reshape(-1)
    if g.size == 0 or g[0] <= 0.0 or np.any(np.diff(g) <= 0.0):
        raise DomainError("grid radii must be positive and strictly increasing")
    return g


def wolff_radial_profile(nf, measure, grid, cfg=DEFAULT, backend=None, packed=None):
    """Wolff potential of a radial measure on a grid of radii."""
    if packed is None:
        _same_dim(nf, measure)
        packed = nf.packed(0)
    g = _radial_grid(measure, grid)
    res = evaluate(packed, measure, g, cfg, backend=backend)
    return RadialProfile(g, res.values)


def wolff_p_radial_profile(p, measure, grid, cfg=DEFAULT, backend=None):
    return wolff_radial_profile(None, measure, grid, cfg, backend, packed=np.array([float(p), float(p), 1.0]))


def truncated_series(nf, measure, x, R_list, cfg=DEFAULT, backend=None):
    """W_G^R sigma(x) for each R in an ascending list (inf allowed last)."""
    _same_dim(nf, measure)
    Rs = [float(r) for r in R_list]
    if any(not r > 0.0 for r in Rs) or any(b < a for a, b in zip(Rs, Rs[1:])):
        raise DomainError("R_list must be positive and ascending")
    return [wolff_point(nf, measure, x, cfg.with_(R=r), backend) for r in Rs]
