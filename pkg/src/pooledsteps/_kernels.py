"""Compiled scalar kernels for the hot paths of the finite-volume engine.

The public modules expose readable Python versions of the same formulas; the
test suite pins the two against each other.  Kernels never raise: failures
are reported through a boolean flag or a negative sentinel.
"""

import math

import numpy as np
from numba import njit

_TOL = 1e-12


@njit(cache=True)
def lax1_forward(h, h0, v0, g):
    if h <= h0:
        return v0 - 2.0 * (math.sqrt(g * h) - math.sqrt(g * h0))
    return v0 - (h - h0) * math.sqrt(0.5 * g * (h + h0) / (h * h0))


@njit(cache=True)
def lax1_forward_slope(h, h0, g):
    if h <= h0:
        return -math.sqrt(g / h)
    s = math.sqrt(0.5 * g * (h + h0) / (h * h0))
    return -(s - (h - h0) * g / (4.0 * h * h * s))


@njit(cache=True)
def lax2_reversed(h, h0, v0, g):
    if h <= h0:
        return v0 + 2.0 * (math.sqrt(g * h) - math.sqrt(g * h0))
    return v0 + (h - h0) * math.sqrt(0.5 * g * (h + h0) / (h * h0))


@njit(cache=True)
def lax2_reversed_slope(h, h0, g):
    if h <= h0:
        return math.sqrt(g / h)
    s = math.sqrt(0.5 * g * (h + h0) / (h * h0))
    return s - (h - h0) * g / (4.0 * h * h * s)


@njit(cache=True)
def middle_depth(hl, vl, hr, vr, g):
    """Depth of the star state of the classical Riemann problem, or -1.0 when
    the data open a vacuum."""
    sl = math.sqrt(g * hl)
    sr = math.sqrt(g * hr)
    if vl + 2.0 * sl - (vr - 2.0 * sr) <= 0.0:
        return -1.0
    if hl == hr and vl == vr:
        return hl
    lo = 0.0
    hi = 10.0 * max(hl, hr)
    while lax1_forward(hi, hl, vl, g) - lax2_reversed(hi, hr, vr, g) > 0.0:
        lo = hi
        hi *= 2.0
    # two-rarefaction estimate, exact when both waves are rarefactions
    c = 0.25 * (vl - vr) + 0.5 * (sl + sr)
    h = c * c / g
    if not (lo < h < hi):
        h = 0.5 * (lo + hi)
    for _ in range(200):
        f = lax1_forward(h, hl, vl, g) - lax2_reversed(h, hr, vr, g)
        if f == 0.0:
            return h
        if f > 0.0:
            lo = h
        else:
            hi = h
        df = lax1_forward_slope(h, hl, g) - lax2_reversed_slope(h, hr, g)
        hn = h - f / df
        if not (lo < hn < hi):
            hn = 0.5 * (lo + hi)
        if abs(hn - h) <= _TOL * max(1.0, h):
            h = hn
            break
        h = hn
    # the stopping test may fire on a bisection step; a few Newton steps
    # recover full precision
    f = lax1_forward(h, hl, vl, g) - lax2_reversed(h, hr, vr, g)
    for _ in range(3):
        if f == 0.0:
            break
        hn = h - f / (lax1_forward_slope(h, hl, g) - lax2_reversed_slope(h, hr, g))
        if not hn > 0.0:
            break
        fn = lax1_forward(hn, hl, vl, g) - lax2_reversed(hn, hr, vr, g)
        if not abs(fn) < abs(f):
            break
        h, f = hn, fn
    return h


@njit(cache=True)
def sample_at_zero(hl, vl, hr, vr, g):
    """State ``(h, v)`` at x/t = 0 of the exact Riemann solution.

    Returns ``(h, v, ok)``; ``ok`` is False for vacuum-forming data.
    """
    if hl == hr and vl == vr:
        return hl, vl, True
    hm = middle_depth(hl, vl, hr, vr, g)
    if hm < 0.0:
        return 0.0, 0.0, False
    vm = lax1_forward(hm, hl, vl, g)
    sl = math.sqrt(g * hl)
    sm = math.sqrt(g * hm)
    sr = math.sqrt(g * hr)
    # 1-wave
    if hm > hl:
        if vl - math.sqrt(0.5 * g * hm * (hm + hl) / hl) >= 0.0:
            return hl, vl, True
    else:
        if vl - sl >= 0.0:
            return hl, vl, True
        if vm - sm > 0.0:
            c = (vl + 2.0 * sl) / 3.0
            return c * c / g, c, True
    # 2-wave
    if hm > hr:
        if vr + math.sqrt(0.5 * g * hm * (hm + hr) / hr) <= 0.0:
            return hr, vr, True
    else:
        if vr + sr <= 0.0:
            return hr, vr, True
        if vm + sm < 0.0:
            c = (2.0 * sr - vr) / 3.0
            return c * c / g, -c, True
    return hm, vm, True


@njit(cache=True)
def godunov_flux(hl, ql, hr, qr, g):
    """Exact-Riemann Godunov flux between conservative states.

    Returns ``(mass, momentum, ok)``.
    """
    if hl == hr and ql == qr:
        return ql, ql * ql / hl + 0.5 * g * hl * hl, True
    h, v, ok = sample_at_zero(hl, ql / hl, hr, qr / hr, g)
    if not ok:
        return 0.0, 0.0, False
    return h * v, h * v * v + 0.5 * g * h * h, True


@njit(cache=True)
def interior_fluxes(h, q, g, fm, fp):
    """Fill ``fm[1:-1]``, ``fp[1:-1]`` with interface fluxes of one canal.

    Returns -1 on success or the index of the first vacuum-forming interface.
    """
    n = h.shape[0]
    for i in range(1, n):
        m, p, ok = godunov_flux(h[i - 1], q[i - 1], h[i], q[i], g)
        if not ok:
            return i
        fm[i] = m
        fp[i] = p
    return -1


@njit(cache=True)
def max_speed(h, q, g):
    s = 0.0
    for i in range(h.shape[0]):
        a = abs(q[i] / h[i]) + math.sqrt(g * h[i])
        if a > s:
            s = a
    return s


@njit(cache=True)
def _overflow(d, C):
    # signed C * |d|^{3/2}
    if d >= 0.0:
        return C * d * math.sqrt(d)
    return -C * (-d) * math.sqrt(-d)


@njit(cache=True)
def _weir_residual(a, b, hl, vl, hr, vr, Hm, Hp, C, g):
    q1 = a * lax1_forward(a, hl, vl, g)
    q2 = b * lax2_reversed(b, hr, vr, g)
    d = max(a - Hm, 0.0) - max(b - Hp, 0.0)
    return q1 - _overflow(d, C), q2 - q1, q1, d


@njit(cache=True)
def weir_newton(hl, vl, hr, vr, Hm, Hp, C, g, max_iter):
    """Damped Newton solve of the weir coupling for the two trace depths.

    Unknowns are the left trace depth ``a`` on the forward 1-curve through
    ``(hl, vl)`` and the right trace depth ``b`` on the reversed 2-curve
    through ``(hr, vr)``.  The iterates are confined to the branches where the
    1-wave moves left and the 2-wave moves right.

    Returns ``(a, b, mass_flux, ok)``.
    """
    sl = math.sqrt(g * hl)
    sr = math.sqrt(g * hr)
    if vl - sl >= 0.0 or vr + sr <= 0.0 or vl + 2.0 * sl <= 0.0:
        return 0.0, 0.0, 0.0, False
    ca = (vl + 2.0 * sl) / 3.0
    a_min = ca * ca / g
    cb = (2.0 * sr - vr) / 3.0
    b_min = cb * cb / g if cb > 0.0 else 0.0

    a = hl
    b = hr
    f1, f2, qf, d = _weir_residual(a, b, hl, vl, hr, vr, Hm, Hp, C, g)
    scale = max(1.0, abs(hl * vl), abs(hr * vr), C * hl * sl / math.sqrt(g))
    for _ in range(max_iter):
        norm = max(abs(f1), abs(f2))
        if norm <= 1e-13 * scale:
            return a, b, qf, True
        dq1 = lax1_forward(a, hl, vl, g) + a * lax1_forward_slope(a, hl, g)
        dq2 = lax2_reversed(b, hr, vr, g) + b * lax2_reversed_slope(b, hr, g)
        k = 1.5 * C * math.sqrt(abs(d))
        j11 = dq1 - (k if a > Hm else 0.0)
        j12 = k if b > Hp else 0.0
        j21 = -dq1
        j22 = dq2
        det = j11 * j22 - j12 * j21
        if det == 0.0 or not math.isfinite(det):
            return a, b, qf, False
        da = (f1 * j22 - f2 * j12) / det
        db = (j11 * f2 - j21 * f1) / det
        lam = 1.0
        accepted = False
        for _ in range(60):
            an = a - lam * da
            bn = b - lam * db
            if an > a_min and bn > b_min:
                g1, g2, qn, dn = _weir_residual(an, bn, hl, vl, hr, vr, Hm, Hp, C, g)
                if max(abs(g1), abs(g2)) < (1.0 - 1e-4 * lam) * norm:
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            # stalled at round-off level is still a converged answer
            return a, b, qf, norm <= 1e-10 * scale
        a, b, f1, f2, qf, d = an, bn, g1, g2, qn, dn
    return a, b, qf, max(abs(f1), abs(f2)) <= 1e-10 * scale


@njit(cache=True)
def gamma_intersection(hl, vl, H, C, g):
    """Depth where the forward 1-curve through ``(hl, vl)`` meets the
    critical overflow curve over a crest ``H``; -1.0 if it never does."""
    if vl + 2.0 * math.sqrt(g * hl) <= 0.0:
        return -1.0
    lo = 0.0
    hi = 10.0 * max(hl, H, 1e-3)
    for _ in range(200):
        d = max(hi - H, 0.0)
        if lax1_forward(hi, hl, vl, g) - C * d * math.sqrt(d) / hi < 0.0:
            break
        lo = hi
        hi *= 2.0
    h = hl if lo < hl < hi else 0.5 * (lo + hi)
    for _ in range(300):
        d = max(h - H, 0.0)
        f = lax1_forward(h, hl, vl, g) - C * d * math.sqrt(d) / h
        if f == 0.0:
            return h
        if f > 0.0:
            lo = h
        else:
            hi = h
        df = lax1_forward_slope(h, hl, g)
        if d > 0.0:
            df -= C * math.sqrt(d) * (0.5 * h + H) / (h * h)
        hn = h - f / df
        if not (lo < hn < hi):
            hn = 0.5 * (lo + hi)
        if abs(hn - h) <= _TOL * max(1.0, h) and hn == hn:
            h = hn
            break
        h = hn
    for _ in range(3):
        d = max(h - H, 0.0)
        f = lax1_forward(h, hl, vl, g) - C * d * math.sqrt(d) / h
        if f == 0.0:
            break
        df = lax1_forward_slope(h, hl, g)
        if d > 0.0:
            df -= C * math.sqrt(d) * (0.5 * h + H) / (h * h)
        hn = h - f / df
        dn = max(hn - H, 0.0)
        if not (hn > 0.0 and abs(lax1_forward(hn, hl, vl, g) - C * dn * math.sqrt(dn) / hn) < abs(f)):
            break
        h = hn
    return h


def warmup():
    """Trigger compilation of every kernel once."""
    h = np.array([1.0, 2.0])
    q = np.array([0.0, 0.1])
    fm = np.zeros(3)
    fp = np.zeros(3)
    interior_fluxes(h, q, 9.81, fm, fp)
    max_speed(h, q, 9.81)
    weir_newton(2.0, 0.0, 1.0, 0.0, 1.5, 1.5, 1.8, 9.81, 30)
    gamma_intersection(2.0, 0.0, 1.5, 1.8, 9.81)
