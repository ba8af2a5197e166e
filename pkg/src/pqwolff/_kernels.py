"""Hot loops: inverse of g, radial ball masses and the Wolff t-quadrature.

Every routine exists twice.  The scalar versions are plain loops compiled by
numba (or run as python when numba is disabled); the ``*_np`` versions are
vectorised numpy equivalents evaluated on exactly the same node sets, so the
two backends agree to rounding.

Packed argument conventions
---------------------------
nf = (p, q, mode)          mode 0: g(t) = t^(p-1) + t^(q-1); mode 1: g(t) = t^(p-1)
dpar[j] = (R_supp, kind, c, shape, logmode, nknots)   one row per density component
    kind 0 constant c, 1 power c r^-shape, 2 gaussian c exp(-r^2 / (2 shape^2));
    logmode 1: multiplier = exp(spline), 0: multiplier = max(spline, 0);
    nknots == 0 means multiplier 1.
sx[j], sc[j]               multiplier spline knots (log r) and coefficients
                           (nknots-1, 4), lowest order first, zero padded
cx[j], cm[j]               cumulative-mass table: log r nodes and masses
"""

import math

import numpy as np

from ._accel import njit, py

LOG2 = math.log(2.0)

N_T = 12  # Gauss-Legendre nodes per t-segment
N_R = 40  # nodes for the partial-shell integral over r
N_C = 8  # nodes for the local cumulative-mass correction
N_Z = 16  # nodes per tail panel

GL_T = np.polynomial.legendre.leggauss(N_T)
GL_R = np.polynomial.legendre.leggauss(N_R)
GL_C = np.polynomial.legendre.leggauss(N_C)
GL_Z = np.polynomial.legendre.leggauss(N_Z)
GLT_X, GLT_W = GL_T
GLR_X, GLR_W = GL_R
GLC_X, GLC_W = GL_C
GLZ_X, GLZ_W = GL_Z

HEAD_FACTOR = 1e-8  # t_min = HEAD_FACTOR * first positive breakpoint
GRADE_RATIO = 0.2


# ---------------------------------------------------------------------------
# g^{-1}


@njit
def ginv_scalar(s, p, q, mode):
    if s <= 0.0:
        return 0.0
    if mode == 1:
        return s ** (1.0 / (p - 1.0))
    if q == p:
        return (0.5 * s) ** (1.0 / (p - 1.0))
    ls = math.log(s)
    a1 = 1.0 / (p - 1.0)
    a2 = 1.0 / (q - 1.0)
    hi = min(a1 * ls, a2 * ls)
    lo = min(a1 * (ls - LOG2), a2 * (ls - LOG2))
    x = hi
    for _ in range(200):
        d = (q - p) * x
        if d < 0.0:
            e = math.exp(d)
            lg = (p - 1.0) * x + math.log1p(e)
            wp = 1.0 / (1.0 + e)
        else:
            e = math.exp(-d)
            lg = (q - 1.0) * x + math.log1p(e)
            wp = e / (1.0 + e)
        phi = lg - ls
        if phi > 0.0:
            hi = x
        elif phi < 0.0:
            lo = x
        else:
            break
        dphi = (p - 1.0) * wp + (q - 1.0) * (1.0 - wp)
        xn = x - phi / dphi
        if not (lo <= xn <= hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 4e-16 * max(1.0, abs(x)):
            x = xn
            break
        x = xn
    return math.exp(x)


def ginv_np(s, p, q, mode):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0.0
    if not pos.any():
        return out
    sp = s[pos]
    if mode == 1:
        out[pos] = sp ** (1.0 / (p - 1.0))
        return out
    if q == p:
        out[pos] = (0.5 * sp) ** (1.0 / (p - 1.0))
        return out
    ls = np.log(sp)
    a1 = 1.0 / (p - 1.0)
    a2 = 1.0 / (q - 1.0)
    hi = np.minimum(a1 * ls, a2 * ls)
    lo = np.minimum(a1 * (ls - LOG2), a2 * (ls - LOG2))
    x = hi.copy()
    active = np.ones(x.shape, dtype=bool)
    for _ in range(200):
        if not active.any():
            break
        xa = x[active]
        d = (q - p) * xa
        neg = d < 0.0
        e = np.exp(np.where(neg, d, -d))
        lg = np.where(neg, (p - 1.0) * xa, (q - 1.0) * xa) + np.log1p(e)
        wp = np.where(neg, 1.0 / (1.0 + e), e / (1.0 + e))
        phi = lg - ls[active]
        ha = np.where(phi > 0.0, xa, hi[active])
        la = np.where(phi < 0.0, xa, lo[active])
        hi[active] = ha
        lo[active] = la
        dphi = (p - 1.0) * wp + (q - 1.0) * (1.0 - wp)
        exact = phi == 0.0
        xn = xa - phi / dphi
        bad = ~((la <= xn) & (xn <= ha))
        xn = np.where(bad, 0.5 * (la + ha), xn)
        xn = np.where(exact, xa, xn)
        done = exact | (np.abs(xn - xa) <= 4e-16 * np.maximum(1.0, np.abs(xa)))
        x[active] = xn
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    out[pos] = np.exp(x)
    return out


# ---------------------------------------------------------------------------
# sphere-cap geometry


@njit
def _sin_power_integral(theta, m):
    """int_0^theta sin^m(u) du by the standard reduction formula."""
    s = math.sin(theta)
    c = math.cos(theta)
    if m % 2 == 0:
        j = theta
        k = 0
    else:
        sh = math.sin(0.5 * theta)
        j = 2.0 * sh * sh
        k = 1
    while k < m:
        k += 2
        j = -(s ** (k - 1)) * c / k + (k - 1.0) / k * j
    return j


@njit
def capfrac_scalar(rho, r, t, n):
    if rho <= 0.0:
        return 1.0 if r < t else 0.0
    if r + rho <= t:
        return 1.0
    if abs(rho - r) >= t:
        return 0.0
    two = 2.0 * rho * r
    omc = (t - rho + r) * (t + rho - r) / two
    opc = (rho + r - t) * (rho + r + t) / two
    if n == 3:
        return min(max(0.5 * omc, 0.0), 1.0)
    theta = 2.0 * math.atan2(math.sqrt(max(omc, 0.0)), math.sqrt(max(opc, 0.0)))
    f = _sin_power_integral(theta, n - 2) / _sin_power_integral(math.pi, n - 2)
    return min(max(f, 0.0), 1.0)


def _sin_power_integral_np(theta, m):
    s = np.sin(theta)
    c = np.cos(theta)
    if m % 2 == 0:
        j = np.array(theta, dtype=float)
        k = 0
    else:
        sh = np.sin(0.5 * theta)
        j = 2.0 * sh * sh
        k = 1
    while k < m:
        k += 2
        j = -(s ** (k - 1)) * c / k + (k - 1.0) / k * j
    return j


def capfrac_np(rho, r, t, n):
    rho = float(rho)
    r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
    if rho <= 0.0:
        return np.where(r < t, 1.0, 0.0)
    full = r + rho <= t
    empty = np.abs(rho - r) >= t
    two = 2.0 * rho * r
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        omc = (t - rho + r) * (t + rho - r) / two
        opc = (rho + r - t) * (rho + r + t) / two
    if n == 3:
        f = np.clip(0.5 * omc, 0.0, 1.0)
    else:
        theta = 2.0 * np.arctan2(np.sqrt(np.maximum(omc, 0.0)), np.sqrt(np.maximum(opc, 0.0)))
        f = _sin_power_integral_np(theta, n - 2) / py(_sin_power_integral)(math.pi, n - 2)
        f = np.clip(f, 0.0, 1.0)
    return np.where(full, 1.0, np.where(empty, 0.0, f))


# ---------------------------------------------------------------------------
# radial density components and their cumulative masses


@njit
def _spline_eval(x, sx, sc, m):
    if x <= sx[0]:
        return sc[0, 0]
    lo = 0
    hi = m - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if sx[mid] <= x:
            lo = mid
        else:
            hi = mid
    k = min(lo, m - 2)
    dx = x - sx[k]
    return ((sc[k, 3] * dx + sc[k, 2]) * dx + sc[k, 1]) * dx + sc[k, 0]


@njit
def density_comp_scalar(r, j, dpar, sx, sc):
    rs = dpar[j, 0]
    if r >= rs or r <= 0.0:
        return 0.0
    kind = int(dpar[j, 1])
    c = dpar[j, 2]
    if kind == 0:
        b = c
    elif kind == 1:
        b = c * r ** (-dpar[j, 3])
    else:
        z = r / dpar[j, 3]
        b = c * math.exp(-0.5 * z * z)
    m = int(dpar[j, 5])
    if m == 0:
        return b
    v = _spline_eval(math.log(r), sx[j], sc[j], m)
    if dpar[j, 4] > 0.5:
        return b * math.exp(v)
    return b * max(v, 0.0)


def _spline_eval_np(x, sx, sc, m):
    k = np.clip(np.searchsorted(sx[:m], x, side="right") - 1, 0, m - 2)
    dx = x - sx[k]
    v = ((sc[k, 3] * dx + sc[k, 2]) * dx + sc[k, 1]) * dx + sc[k, 0]
    return np.where(x <= sx[0], sc[0, 0], v)


def density_comp_np(r, j, dpar, sx, sc):
    r = np.asarray(r, dtype=float)
    rs = dpar[j, 0]
    inside = (r < rs) & (r > 0.0)
    rr = np.where(inside, r, 1.0)
    kind = int(dpar[j, 1])
    c = dpar[j, 2]
    if kind == 0:
        b = np.full(rr.shape, c)
    elif kind == 1:
        b = c * rr ** (-dpar[j, 3])
    else:
        z = rr / dpar[j, 3]
        b = c * np.exp(-0.5 * z * z)
    m = int(dpar[j, 5])
    if m > 0:
        v = _spline_eval_np(np.log(rr), sx[j], sc[j], m)
        if dpar[j, 4] > 0.5:
            b = b * np.exp(v)
        else:
            b = b * np.maximum(v, 0.0)
    return np.where(inside, b, 0.0)


@njit
def _head_exponent(dpar, j):
    return dpar[j, 3] if int(dpar[j, 1]) == 1 else 0.0


@njit
def cum_mass_comp_scalar(r, j, dpar, sx, sc, cx, cm, n, snc):
    """Mass of component j inside the ball of radius r about the origin."""
    rs = dpar[j, 0]
    if r <= 0.0:
        return 0.0
    kk = cx.shape[1]
    if r >= rs:
        return cm[j, kk - 1]
    x = math.log(r)
    if x <= cx[j, 0]:
        return snc * density_comp_scalar(r, j, dpar, sx, sc) * r**n / (n - _head_exponent(dpar, j))
    lo = 0
    hi = kk - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cx[j, mid] <= x:
            lo = mid
        else:
            hi = mid
    a = cx[j, lo]
    h = x - a
    acc = 0.0
    for i in range(N_C):
        xi = a + 0.5 * h * (GLC_X[i] + 1.0)
        acc += GLC_W[i] * density_comp_scalar(math.exp(xi), j, dpar, sx, sc) * math.exp(n * xi)
    return cm[j, lo] + snc * 0.5 * h * acc


def cum_mass_comp_np(r, j, dpar, sx, sc, cx, cm, n, snc):
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape)
    rs = dpar[j, 0]
    top = r >= rs
    out[top] = cm[j, -1]
    mid = (r > 0.0) & ~top
    if not mid.any():
        return out
    rm = r[mid]
    x = np.log(rm)
    head = x <= cx[j, 0]
    val = np.empty(rm.shape)
    if head.any():
        rh = rm[head]
        val[head] = snc * density_comp_np(rh, j, dpar, sx, sc) * rh**n / (n - py(_head_exponent)(dpar, j))
    body = ~head
    if body.any():
        xb = x[body]
        k = np.clip(np.searchsorted(cx[j], xb, side="right") - 1, 0, cx.shape[1] - 1)
        a = cx[j, k]
        h = xb - a
        xi = a[:, None] + 0.5 * h[:, None] * (GLC_X[None, :] + 1.0)
        f = density_comp_np(np.exp(xi), j, dpar, sx, sc) * np.exp(n * xi)
        val[body] = cm[j, k] + snc * 0.5 * h * (f @ GLC_W)
    out[mid] = val
    return out


def build_cumulative_table(dpar, sx, sc, j, n, snc, nodes=2048, decades=10.0):
    """Cumulative shell mass of component j on a log grid ending at its support radius.

    Interval increments use 16-point Gauss-Legendre in log r; queries between
    nodes add a local 8-point correction instead of interpolating the table.
    """
    rs = dpar[j, 0]
    cx = math.log(rs) + np.linspace(-decades * math.log(10.0), 0.0, nodes)
    xg, wg = np.polynomial.legendre.leggauss(16)
    a = cx[:-1]
    h = np.diff(cx)
    xi = a[:, None] + 0.5 * h[:, None] * (xg[None, :] + 1.0)
    ri = np.minimum(np.exp(xi), np.nextafter(rs, 0.0))
    f = density_comp_np(ri, j, dpar, sx, sc) * np.exp(n * xi)
    inc = snc * 0.5 * h * (f @ wg)
    r0 = math.exp(cx[0])
    d0 = float(density_comp_np(np.array([r0]), j, dpar, sx, sc)[0])
    m0 = snc * d0 * r0**n / (n - py(_head_exponent)(dpar, j))
    cm = np.concatenate([[m0], m0 + np.cumsum(inc)])
    return cx, cm


# ---------------------------------------------------------------------------
# ball masses


@njit
def ball_mass_density_scalar(rho, t, dpar, sx, sc, cx, cm, n, snc):
    total = 0.0
    if t <= 0.0:
        return 0.0
    for j in range(dpar.shape[0]):
        rs = dpar[j, 0]
        if rho <= 0.0:
            total += cum_mass_comp_scalar(min(t, rs), j, dpar, sx, sc, cx, cm, n, snc)
            continue
        if t > rho:
            total += cum_mass_comp_scalar(min(t - rho, rs), j, dpar, sx, sc, cx, cm, n, snc)
        a = abs(t - rho)
        b = min(t + rho, rs)
        if b <= a:
            continue
        h = b - a
        acc = 0.0
        for i in range(N_R):
            phi = 0.5 * math.pi * (GLR_X[i] + 1.0)
            sh = math.sin(0.5 * phi)
            r = a + h * sh * sh
            w = density_comp_scalar(r, j, dpar, sx, sc)
            if w > 0.0:
                acc += GLR_W[i] * w * r ** (n - 1) * capfrac_scalar(rho, r, t, n) * 0.5 * h * math.sin(phi)
        total += snc * 0.5 * math.pi * acc
    return total


def ball_mass_density_np(rho, t, dpar, sx, sc, cx, cm, n, snc):
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    pos = t > 0.0
    for j in range(dpar.shape[0]):
        rs = dpar[j, 0]
        if rho <= 0.0:
            out += np.where(pos, cum_mass_comp_np(np.minimum(t, rs), j, dpar, sx, sc, cx, cm, n, snc), 0.0)
            continue
        inner = t > rho
        if inner.any():
            out[inner] += cum_mass_comp_np(np.minimum(t[inner] - rho, rs), j, dpar, sx, sc, cx, cm, n, snc)
        a = np.abs(t - rho)
        b = np.minimum(t + rho, rs)
        part = (b > a) & pos
        if not part.any():
            continue
        ap = a[part]
        hp = (b - a)[part]
        tp = t[part]
        phi = 0.5 * np.pi * (GLR_X + 1.0)
        sh = np.sin(0.5 * phi)
        r = ap[:, None] + hp[:, None] * (sh * sh)[None, :]
        w = density_comp_np(r, j, dpar, sx, sc)
        cf = capfrac_np(rho, r, np.broadcast_to(tp[:, None], r.shape), n)
        integrand = w * r ** (n - 1) * cf * (0.5 * hp[:, None] * np.sin(phi)[None, :])
        out[part] += snc * 0.5 * np.pi * (integrand @ GLR_W)
    return out


@njit
def ball_mass_atoms_scalar(t, ad, am):
    s = 0.0
    for i in range(ad.shape[0]):
        if ad[i] < t:
            s += am[i]
    return s


def ball_mass_atoms_np(t, ad, am):
    t = np.asarray(t, dtype=float)
    if ad.shape[0] == 0:
        return np.zeros(t.shape)
    return ((ad[None, :] < t[..., None]) * am[None, :]).sum(axis=-1)


# ---------------------------------------------------------------------------
# t-quadrature layout


@njit
def _breakpoints(rho, ad, dpar):
    """Sorted positive breakpoints, the mass-onset radius and the saturation radius."""
    na = ad.shape[0]
    nc = dpar.shape[0]
    cand = np.empty(na + 3 * nc)
    k = 0
    t0 = np.inf
    for i in range(na):
        if ad[i] > 0.0:
            cand[k] = ad[i]
            k += 1
        t0 = min(t0, ad[i])
    for j in range(nc):
        rs = dpar[j, 0]
        if rho != rs:
            cand[k] = abs(rho - rs)
            k += 1
        cand[k] = rho + rs
        k += 1
        if rho > 0.0 and rho < rs:
            cand[k] = rho
            k += 1
        t0 = min(t0, max(rho - rs, 0.0))
    c = np.sort(cand[:k])
    keep = np.empty(k)
    m = 0
    for i in range(k):
        if m == 0 or c[i] > keep[m - 1] * (1.0 + 1e-13):
            keep[m] = c[i]
            m += 1
    sat = keep[m - 1] if m > 0 else 0.0
    return keep[:m], t0, sat


@njit
def _layout(edges, grade, level):
    """Segments in log t covering consecutive edges, graded toward flagged edges."""
    ne = edges.shape[0]
    kg = 2 + 2 * level
    bound = 0
    for j in range(ne - 1):
        length = math.log(edges[j + 1] / edges[j])
        bound += 2 * level * (int(length) + 2 * (kg + 3))
    seg = np.empty((bound, 2))
    ns = 0
    for j in range(ne - 1):
        s0 = math.log(edges[j])
        s1 = math.log(edges[j + 1])
        sm = 0.5 * (s0 + s1)
        for side in range(2):
            anchor = s0 if side == 0 else s1
            graded = grade[j] if side == 0 else grade[j + 1]
            half = sm - anchor
            nl = kg if graded else 0
            prev = 0.0
            for layer in range(nl + 1):
                frac = GRADE_RATIO ** (nl - layer) if layer < nl else 1.0
                lo = anchor + prev * half
                hi = anchor + frac * half
                prev = frac
                # every layer gains pieces with each level, so successive levels
                # always differ and their agreement is a real error estimate
                pieces = level * max(1, int(math.ceil(abs(hi - lo) - 1e-12)))
                for ip in range(pieces):
                    a = lo + (hi - lo) * ip / pieces
                    b = lo + (hi - lo) * (ip + 1) / pieces
                    seg[ns, 0] = min(a, b)
                    seg[ns, 1] = max(a, b)
                    ns += 1
    return seg[:ns]


@njit
def t_layout(rho, ad, am, dpar, big_r, big_a, level):
    """Quadrature nodes and weights in t for one evaluation point.

    Returns (t, w, t_head, t_tail).  t_head > 0 asks for a power-law head
    piece on (0, t_head); t_tail > 0 asks for the saturated-mass tail on
    (t_tail, inf).  An empty node array with both zero means the integral
    vanishes identically.
    """
    empty = np.empty(0)
    bps, t0, sat = _breakpoints(rho, ad, dpar)
    if t0 == np.inf:
        return empty, empty, 0.0, 0.0
    if sat == 0.0:
        # only atoms sitting at the point: the integrand is a fixed function of
        # t and any split scale works
        sat = 1.0
    finite_r = big_r < np.inf
    end = big_r if finite_r else sat
    if t0 >= end:
        if finite_r:
            return empty, empty, 0.0, 0.0
        return empty, empty, 0.0, t0
    inner = 0
    for i in range(bps.shape[0]):
        if bps[i] > t0 and bps[i] < end * (1.0 - 1e-13):
            inner += 1
    ne = inner + 2
    edges = np.empty(ne)
    grade = np.ones(ne, dtype=np.bool_)
    t_head = 0.0
    if t0 > 0.0:
        edges[0] = t0
    else:
        first = end
        for i in range(bps.shape[0]):
            if bps[i] > 0.0:
                first = min(first, bps[i])
                break
        t_head = HEAD_FACTOR * first
        edges[0] = t_head
        grade[0] = False
    k = 1
    for i in range(bps.shape[0]):
        if bps[i] > t0 and bps[i] < end * (1.0 - 1e-13):
            edges[k] = bps[i]
            k += 1
    edges[ne - 1] = end
    seg = _layout(edges, grade, level)
    ns = seg.shape[0]
    t = np.empty(ns * N_T)
    w = np.empty(ns * N_T)
    for i in range(ns):
        a = seg[i, 0]
        hh = 0.5 * (seg[i, 1] - a)
        for j in range(N_T):
            ts = math.exp(a + hh * (GLT_X[j] + 1.0))
            t[i * N_T + j] = ts
            w[i * N_T + j] = GLT_W[j] * hh * ts
    t_tail = 0.0 if finite_r else end
    return t, w, t_head, t_tail


# ---------------------------------------------------------------------------
# tail beyond mass saturation (R = inf)


@njit
def tail_integral(mass, T, p, q, mode, n, big_a):
    """int_T^inf g^{-1}(mass / (A t^(n-1))) dt for constant enclosed mass.

    With y = g^{-1}(...) the integral equals C int_0^{y_T} g(y)^{-1/(n-1)} dy - y_T T,
    C = (mass/A)^{1/(n-1)}.  The y-integral is done in z = log y: a binomial
    series where y^(q-p) <= 1/2, Gauss-Legendre panels above.  When q - p is
    tiny the series range is far below y_T and only the panels are needed.
    """
    if mass <= 0.0:
        return 0.0
    if mode == 1 or p == q:
        coef = 1.0 if mode == 1 else 0.5
        k = (n - 1.0) / (p - 1.0)
        return (coef * mass / big_a) ** (1.0 / (p - 1.0)) * T ** (1.0 - k) / (k - 1.0)
    a = 1.0 / (n - 1.0)
    beta = (p - 1.0) / (n - 1.0)
    yt = ginv_scalar(mass / (big_a * T ** (n - 1.0)), p, q, 0)
    zt = math.log(yt)
    d = q - p
    # the integrand carries exp(z (1 - beta)); below zt - 40/(1 - beta) it is under e^-40 of the total
    zlo = zt - 40.0 / (1.0 - beta)
    zs = min(zt, -LOG2 / d)
    ser = 0.0
    if zs >= zlo:
        coefk = 1.0
        rr = math.exp(zs * d)
        base = math.exp(zs * (1.0 - beta))
        rk = 1.0
        for k in range(2000):
            term = coefk * base * rk / (1.0 - beta + k * d)
            ser += term
            if abs(term) <= 1e-18 * abs(ser):
                break
            coefk *= (-a - k) / (k + 1.0)
            rk *= rr
    else:
        zs = zlo
    quad = 0.0
    if zt > zs:
        npan = max(1, int(math.ceil(2.0 * (zt - zs))))
        hz = (zt - zs) / npan
        for ip in range(npan):
            z0 = zs + ip * hz
            for j in range(N_Z):
                z = z0 + 0.5 * hz * (GLZ_X[j] + 1.0)
                quad += GLZ_W[j] * 0.5 * hz * math.exp(z * (1.0 - beta)) * (1.0 + math.exp(z * d)) ** (-a)
    return (mass / big_a) ** a * (ser + quad) - yt * T


@njit
def head_piece(th, h1, h2):
    """int_0^th of an integrand ~ c t^k, with k fitted from the values at th and 2 th."""
    if h1 <= 0.0 or h2 <= 0.0:
        return 0.0
    k = math.log(h2 / h1) / LOG2
    if k <= -1.0:
        return np.inf
    return th * h1 / (1.0 + k)


# ---------------------------------------------------------------------------
# Wolff values


@njit
def _integrand(t, rho, ad, am, dpar, sx, sc, cx, cm, n, snc, nf, big_a):
    mass = ball_mass_atoms_scalar(t, ad, am) + ball_mass_density_scalar(rho, t, dpar, sx, sc, cx, cm, n, snc)
    return ginv_scalar(mass / (big_a * t ** (n - 1.0)), nf[0], nf[1], int(nf[2]))


@njit
def central_atom_diverges(ad, nf, n):
    """An atom at the evaluation point makes the potential infinite iff the
    large-argument exponent of g^{-1} is too weak: q_eff <= n."""
    for i in range(ad.shape[0]):
        if ad[i] <= 0.0:
            q_eff = nf[0] if int(nf[2]) == 1 else nf[1]
            return q_eff <= n
    return False


@njit
def wolff_level_scalar(rho, ad, am, dpar, sx, sc, cx, cm, n, snc, nf, big_a, big_r, mtot, level):
    if central_atom_diverges(ad, nf, n):
        return np.inf
    t, w, th, tt = t_layout(rho, ad, am, dpar, big_r, big_a, level)
    acc = 0.0
    for i in range(t.shape[0]):
        acc += w[i] * _integrand(t[i], rho, ad, am, dpar, sx, sc, cx, cm, n, snc, nf, big_a)
    if th > 0.0:
        h1 = _integrand(th, rho, ad, am, dpar, sx, sc, cx, cm, n, snc, nf, big_a)
        h2 = _integrand(2.0 * th, rho, ad, am, dpar, sx, sc, cx, cm, n, snc, nf, big_a)
        acc += head_piece(th, h1, h2)
    if tt > 0.0:
        acc += tail_integral(mtot, tt, nf[0], nf[1], int(nf[2]), n, big_a)
    return acc


def _integrand_np(t, rho, ad, am, dpar, sx, sc, cx, cm, n, snc, nf, big_a):
    mass = ball_mass_atoms_np(t, ad, am) + ball_mass_density_np(rho, t, dpar, sx, sc, cx, cm, n, snc)
    return ginv_np(mass / (big_a * t ** (n - 1.0)), nf[0], nf[1], int(nf[2]))


def wolff_level_np(rho, ad, am, dpar, sx, sc, cx, cm, n, snc, nf, big_a, big_r, mtot, level):
    if py(central_atom_diverges)(ad, nf, n):
        return np.inf
    t, w, th, tt = py(t_layout)(rho, ad, am, dpar, big_r, big_a, level)
    acc = 0.0
    if t.shape[0]:
        acc = float(w @ _integrand_np(t, rho, ad, am, dpar, sx, sc, cx, cm, n, snc, nf, big_a))
    if th > 0.0:
        h = _integrand_np(np.array([th, 2.0 * th]), rho, ad, am, dpar, sx, sc, cx, cm, n, snc, nf, big_a)
        acc += py(head_piece)(th, h[0], h[1])
    if tt > 0.0:
        acc += py(tail_integral)(mtot, tt, nf[0], nf[1], int(nf[2]), n, big_a)
    return acc


@njit
def wolff_profile_scalar(rhos, ads, am, dpar, sx, sc, cx, cm, n, snc, nf, big_a, big_r, mtot,
                         levels, rel_tol, max_level, adapt):
    """Wolff values at many points.

    With adapt the level at each point starts at levels[i] and is raised until
    two successive levels agree to rel_tol (or max_level); otherwise levels[i]
    is used as is.  Returns (values, error estimates, levels used).
    """
    npts = rhos.shape[0]
    vals = np.empty(npts)
    errs = np.zeros(npts)
    used = np.empty(npts, dtype=np.int64)
    for i in range(npts):
        lev = levels[i]
        v = wolff_level_scalar(rhos[i], ads[i], am, dpar, sx, sc, cx, cm, n, snc, nf, big_a, big_r, mtot, lev)
        if adapt and np.isfinite(v):
            while True:
                v2 = wolff_level_scalar(rhos[i], ads[i], am, dpar, sx, sc, cx, cm, n, snc, nf, big_a, big_r,
                                        mtot, lev + 1)
                err = abs(v2 - v)
                lev += 1
                v = v2
                if err <= rel_tol * abs(v) or lev >= max_level:
                    errs[i] = err
                    break
        vals[i] = v
        used[i] = lev
    return vals, errs, used


def wolff_profile_np(rhos, ads, am, dpar, sx, sc, cx, cm, n, snc, nf, big_a, big_r, mtot,
                     levels, rel_tol, max_level, adapt):
    npts = rhos.shape[0]
    vals = np.empty(npts)
    errs = np.zeros(npts)
    used = np.empty(npts, dtype=np.int64)
    for i in range(npts):
        lev = int(levels[i])
        v = wolff_level_np(rhos[i], ads[i], am, dpar, sx, sc, cx, cm, n, snc, nf, big_a, big_r, mtot, lev)
        if adapt and np.isfinite(v):
            while True:
                v2 = wolff_level_np(rhos[i], ads[i], am, dpar, sx, sc, cx, cm, n, snc, nf, big_a, big_r,
                                    mtot, lev + 1)
                err = abs(v2 - v)
                lev += 1
                v = v2
                if err <= rel_tol * abs(v) or lev >= max_level:
                    errs[i] = err
                    break
        vals[i] = v
        used[i] = lev
    return vals, errs, used
