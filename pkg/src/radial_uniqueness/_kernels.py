"""Compiled interval kernels for the Taylor/Lohner integrator.

Interval vectors travel as separate ``lo``/``hi`` float64 arrays. Every
rounded operation steps its result one ulp outward. System ids:

* ``MAIN`` (0): state ``(y, v_y, delta, v_delta)`` of the radial equation and
  its variation in ``b``.
* ``SCALED`` (1): state ``(w, v_w, beta)`` of the rescaled equation, with
  ``beta`` carried as a constant state so the Jacobian tracks it.
"""
from __future__ import annotations

import math

import numpy as np

from ._jit import njit

MAIN = 0
SCALED = 1

OK = 0
APRIORI_FAILED = 1
NONFINITE = 2
BAD_INVERSE = 3

# wrapping modes
WRAP_PPED = 0
WRAP_QR = 1
WRAP_HYBRID = 2

_INF = math.inf


@njit
def dn(x):
    return math.nextafter(x, -_INF)


@njit
def up(x):
    return math.nextafter(x, _INF)


@njit
def i_add(al, ah, bl, bh):
    return dn(al + bl), up(ah + bh)


@njit
def i_sub(al, ah, bl, bh):
    return dn(al - bh), up(ah - bl)


@njit
def i_mul(al, ah, bl, bh):
    if (al == 0.0 and ah == 0.0) or (bl == 0.0 and bh == 0.0):
        return 0.0, 0.0
    p1 = al * bl
    p2 = al * bh
    p3 = ah * bl
    p4 = ah * bh
    lo = min(min(p1, p2), min(p3, p4))
    hi = max(max(p1, p2), max(p3, p4))
    return dn(lo), up(hi)


@njit
def i_scale(c, al, ah):
    """Thin float ``c`` times ``[al, ah]``."""
    if c == 0.0:
        return 0.0, 0.0
    if c > 0.0:
        return dn(c * al), up(c * ah)
    return dn(c * ah), up(c * al)


@njit
def i_sqr(al, ah):
    if al >= 0.0:
        return dn(al * al), up(ah * ah)
    if ah <= 0.0:
        return dn(ah * ah), up(al * al)
    m = max(-al, ah)
    return 0.0, up(m * m)


@njit
def i_div_int(al, ah, k):
    fk = float(k)
    return dn(al / fk), up(ah / fk)


@njit
def i_recip_pos(al, ah):
    return dn(1.0 / ah), up(1.0 / al)


@njit
def conv(alo, ahi, blo, bhi, k):
    """Coefficient ``k`` of the product of two Taylor series."""
    slo = 0.0
    shi = 0.0
    for j in range(k + 1):
        pl, ph = i_mul(alo[j], ahi[j], blo[k - j], bhi[k - j])
        slo = dn(slo + pl)
        shi = up(shi + ph)
    return slo, shi


@njit
def conv_sqr(alo, ahi, k):
    """Coefficient ``k`` of the square of a Taylor series (symmetric sum)."""
    slo = 0.0
    shi = 0.0
    half = (k + 1) // 2
    for j in range(half):
        pl, ph = i_mul(alo[j], ahi[j], alo[k - j], ahi[k - j])
        slo = dn(slo + 2.0 * pl)
        shi = up(shi + 2.0 * ph)
    if k % 2 == 0:
        m = k // 2
        ql, qh = i_sqr(alo[m], ahi[m])
        slo = dn(slo + ql)
        shi = up(shi + qh)
    return slo, shi


@njit
def _inverse_time_series(t_lo, t_hi, p, ulo, uhi):
    # 1/(t + tau) = sum_k (-1)^k tau^k / t^(k+1); t > 0
    r_lo, r_hi = i_recip_pos(t_lo, t_hi)
    plo = r_lo
    phi = r_hi
    for k in range(p + 1):
        if k % 2 == 0:
            ulo[k] = plo
            uhi[k] = phi
        else:
            ulo[k] = -phi
            uhi[k] = -plo
        plo = dn(plo * r_lo)
        phi = up(phi * r_hi)


@njit
def main_series(x_lo, x_hi, t_lo, t_hi, p, want_jac):
    """Taylor coefficients 0..p of the radial system and (optionally) its Jacobian.

    Returns ``(c_lo, c_hi, j_lo, j_hi)`` with ``c[k, i]`` the k-th coefficient of
    state component ``i`` and ``j[k, i, m]`` the k-th coefficient of
    ``d x_i / d x_m(t)``.
    """
    n = 4
    y_lo = np.zeros(p + 1)
    y_hi = np.zeros(p + 1)
    v_lo = np.zeros(p + 1)
    v_hi = np.zeros(p + 1)
    d_lo = np.zeros(p + 1)
    d_hi = np.zeros(p + 1)
    w_lo = np.zeros(p + 1)
    w_hi = np.zeros(p + 1)
    u_lo = np.zeros(p + 1)
    u_hi = np.zeros(p + 1)
    y2_lo = np.zeros(p + 1)
    y2_hi = np.zeros(p + 1)
    fp_lo = np.zeros(p + 1)
    fp_hi = np.zeros(p + 1)
    g_lo = np.zeros(p + 1)
    g_hi = np.zeros(p + 1)
    _inverse_time_series(t_lo, t_hi, p, u_lo, u_hi)
    y_lo[0] = x_lo[0]
    y_hi[0] = x_hi[0]
    v_lo[0] = x_lo[1]
    v_hi[0] = x_hi[1]
    d_lo[0] = x_lo[2]
    d_hi[0] = x_hi[2]
    w_lo[0] = x_lo[3]
    w_hi[0] = x_hi[3]

    nj = n if want_jac else 0
    jy_lo = np.zeros((nj, p + 1))
    jy_hi = np.zeros((nj, p + 1))
    jv_lo = np.zeros((nj, p + 1))
    jv_hi = np.zeros((nj, p + 1))
    jd_lo = np.zeros((nj, p + 1))
    jd_hi = np.zeros((nj, p + 1))
    jw_lo = np.zeros((nj, p + 1))
    jw_hi = np.zeros((nj, p + 1))
    if want_jac:
        jy_lo[0, 0] = 1.0
        jy_hi[0, 0] = 1.0
        jv_lo[1, 0] = 1.0
        jv_hi[1, 0] = 1.0
        jd_lo[2, 0] = 1.0
        jd_hi[2, 0] = 1.0
        jw_lo[3, 0] = 1.0
        jw_hi[3, 0] = 1.0

    for k in range(p):
        kp = k + 1
        # y^2, y^3 - y
        y2_lo[k], y2_hi[k] = conv_sqr(y_lo, y_hi, k)
        y3l, y3h = conv(y2_lo, y2_hi, y_lo, y_hi, k)
        fl, fh = i_sub(y3l, y3h, y_lo[k], y_hi[k])
        uvl, uvh = conv(u_lo, u_hi, v_lo, v_hi, k)
        y_lo[kp], y_hi[kp] = i_div_int(v_lo[k], v_hi[k], kp)
        al, ah = i_add(-2.0 * uvh, -2.0 * uvl, -fh, -fl)
        v_lo[kp], v_hi[kp] = i_div_int(al, ah, kp)
        # f'(y) = 3 y^2 - 1
        fpl, fph = i_scale(3.0, y2_lo[k], y2_hi[k])
        if k == 0:
            fpl = dn(fpl - 1.0)
            fph = up(fph - 1.0)
        fp_lo[k] = fpl
        fp_hi[k] = fph
        uwl, uwh = conv(u_lo, u_hi, w_lo, w_hi, k)
        fdl, fdh = conv(fp_lo, fp_hi, d_lo, d_hi, k)
        d_lo[kp], d_hi[kp] = i_div_int(w_lo[k], w_hi[k], kp)
        al, ah = i_add(-2.0 * uwh, -2.0 * uwl, -fdh, -fdl)
        w_lo[kp], w_hi[kp] = i_div_int(al, ah, kp)
        if want_jac:
            # f''(y) delta = 6 y delta
            ydl, ydh = conv(y_lo, y_hi, d_lo, d_hi, k)
            g_lo[k], g_hi[k] = i_scale(6.0, ydl, ydh)
            for c in range(n):
                jy_lo[c, kp], jy_hi[c, kp] = i_div_int(jv_lo[c, k], jv_hi[c, k], kp)
                a1l, a1h = conv(u_lo, u_hi, jv_lo[c], jv_hi[c], k)
                a2l, a2h = conv(fp_lo, fp_hi, jy_lo[c], jy_hi[c], k)
                sl, sh = i_add(-2.0 * a1h, -2.0 * a1l, -a2h, -a2l)
                jv_lo[c, kp], jv_hi[c, kp] = i_div_int(sl, sh, kp)
                jd_lo[c, kp], jd_hi[c, kp] = i_div_int(jw_lo[c, k], jw_hi[c, k], kp)
                b1l, b1h = conv(u_lo, u_hi, jw_lo[c], jw_hi[c], k)
                b2l, b2h = conv(g_lo, g_hi, jy_lo[c], jy_hi[c], k)
                b3l, b3h = conv(fp_lo, fp_hi, jd_lo[c], jd_hi[c], k)
                sl, sh = i_add(-2.0 * b1h, -2.0 * b1l, -b2h, -b2l)
                sl, sh = i_sub(sl, sh, b3l, b3h)
                jw_lo[c, kp], jw_hi[c, kp] = i_div_int(sl, sh, kp)

    c_lo = np.empty((p + 1, n))
    c_hi = np.empty((p + 1, n))
    for k in range(p + 1):
        c_lo[k, 0] = y_lo[k]
        c_hi[k, 0] = y_hi[k]
        c_lo[k, 1] = v_lo[k]
        c_hi[k, 1] = v_hi[k]
        c_lo[k, 2] = d_lo[k]
        c_hi[k, 2] = d_hi[k]
        c_lo[k, 3] = w_lo[k]
        c_hi[k, 3] = w_hi[k]
    j_lo = np.zeros((p + 1, n, n))
    j_hi = np.zeros((p + 1, n, n))
    if want_jac:
        for k in range(p + 1):
            for c in range(n):
                j_lo[k, 0, c] = jy_lo[c, k]
                j_hi[k, 0, c] = jy_hi[c, k]
                j_lo[k, 1, c] = jv_lo[c, k]
                j_hi[k, 1, c] = jv_hi[c, k]
                j_lo[k, 2, c] = jd_lo[c, k]
                j_hi[k, 2, c] = jd_hi[c, k]
                j_lo[k, 3, c] = jw_lo[c, k]
                j_hi[k, 3, c] = jw_hi[c, k]
    return c_lo, c_hi, j_lo, j_hi


@njit
def scaled_series(x_lo, x_hi, t_lo, t_hi, p, want_jac):
    """Taylor coefficients of ``w'' + (2/s) w' + w^3 - beta^2 w = 0`` as (w, w', beta)."""
    n = 3
    w_lo = np.zeros(p + 1)
    w_hi = np.zeros(p + 1)
    v_lo = np.zeros(p + 1)
    v_hi = np.zeros(p + 1)
    u_lo = np.zeros(p + 1)
    u_hi = np.zeros(p + 1)
    w2_lo = np.zeros(p + 1)
    w2_hi = np.zeros(p + 1)
    fp_lo = np.zeros(p + 1)
    fp_hi = np.zeros(p + 1)
    bw_lo = np.zeros(p + 1)
    bw_hi = np.zeros(p + 1)
    _inverse_time_series(t_lo, t_hi, p, u_lo, u_hi)
    w_lo[0] = x_lo[0]
    w_hi[0] = x_hi[0]
    v_lo[0] = x_lo[1]
    v_hi[0] = x_hi[1]
    b_lo = x_lo[2]
    b_hi = x_hi[2]
    bb_lo, bb_hi = i_sqr(b_lo, b_hi)
    tb_lo, tb_hi = i_scale(2.0, b_lo, b_hi)

    nj = n if want_jac else 0
    jw_lo = np.zeros((nj, p + 1))
    jw_hi = np.zeros((nj, p + 1))
    jv_lo = np.zeros((nj, p + 1))
    jv_hi = np.zeros((nj, p + 1))
    if want_jac:
        jw_lo[0, 0] = 1.0
        jw_hi[0, 0] = 1.0
        jv_lo[1, 0] = 1.0
        jv_hi[1, 0] = 1.0

    for k in range(p):
        kp = k + 1
        w2_lo[k], w2_hi[k] = conv_sqr(w_lo, w_hi, k)
        w3l, w3h = conv(w2_lo, w2_hi, w_lo, w_hi, k)
        bwl, bwh = i_mul(bb_lo, bb_hi, w_lo[k], w_hi[k])
        fl, fh = i_sub(w3l, w3h, bwl, bwh)
        uvl, uvh = conv(u_lo, u_hi, v_lo, v_hi, k)
        w_lo[kp], w_hi[kp] = i_div_int(v_lo[k], v_hi[k], kp)
        al, ah = i_add(-2.0 * uvh, -2.0 * uvl, -fh, -fl)
        v_lo[kp], v_hi[kp] = i_div_int(al, ah, kp)
        if want_jac:
            fpl, fph = i_scale(3.0, w2_lo[k], w2_hi[k])
            if k == 0:
                fpl, fph = i_sub(fpl, fph, bb_lo, bb_hi)
            fp_lo[k] = fpl
            fp_hi[k] = fph
            bw_lo[k], bw_hi[k] = i_mul(tb_lo, tb_hi, w_lo[k], w_hi[k])
            for c in range(n):
                jw_lo[c, kp], jw_hi[c, kp] = i_div_int(jv_lo[c, k], jv_hi[c, k], kp)
                a1l, a1h = conv(u_lo, u_hi, jv_lo[c], jv_hi[c], k)
                a2l, a2h = conv(fp_lo, fp_hi, jw_lo[c], jw_hi[c], k)
                sl, sh = i_add(-2.0 * a1h, -2.0 * a1l, -a2h, -a2l)
                if c == 2:
                    # d/dbeta of beta^2 w is 2 beta w; the beta-column is constant 1
                    sl, sh = i_add(sl, sh, bw_lo[k], bw_hi[k])
                jv_lo[c, kp], jv_hi[c, kp] = i_div_int(sl, sh, kp)

    c_lo = np.zeros((p + 1, n))
    c_hi = np.zeros((p + 1, n))
    for k in range(p + 1):
        c_lo[k, 0] = w_lo[k]
        c_hi[k, 0] = w_hi[k]
        c_lo[k, 1] = v_lo[k]
        c_hi[k, 1] = v_hi[k]
    c_lo[0, 2] = b_lo
    c_hi[0, 2] = b_hi
    j_lo = np.zeros((p + 1, n, n))
    j_hi = np.zeros((p + 1, n, n))
    if want_jac:
        for k in range(p + 1):
            for c in range(n):
                j_lo[k, 0, c] = jw_lo[c, k]
                j_hi[k, 0, c] = jw_hi[c, k]
                j_lo[k, 1, c] = jv_lo[c, k]
                j_hi[k, 1, c] = jv_hi[c, k]
        j_lo[0, 2, 2] = 1.0
        j_hi[0, 2, 2] = 1.0
    return c_lo, c_hi, j_lo, j_hi


@njit
def series(system, x_lo, x_hi, t_lo, t_hi, p, want_jac):
    if system == MAIN:
        return main_series(x_lo, x_hi, t_lo, t_hi, p, want_jac)
    return scaled_series(x_lo, x_hi, t_lo, t_hi, p, want_jac)


# -- small interval linear algebra -----------------------------------------------
@njit
def affine_eval(x, B, r_lo, r_hi):
    """Interval hull of ``x + B r`` with thin ``x``, ``B``."""
    n = x.shape[0]
    o_lo = np.empty(n)
    o_hi = np.empty(n)
    for i in range(n):
        slo = x[i]
        shi = x[i]
        for j in range(B.shape[1]):
            pl, ph = i_scale(B[i, j], r_lo[j], r_hi[j])
            slo = dn(slo + pl)
            shi = up(shi + ph)
        o_lo[i] = slo
        o_hi[i] = shi
    return o_lo, o_hi


@njit
def imat_thin_mul(a_lo, a_hi, B):
    """Interval matrix times thin matrix."""
    n = a_lo.shape[0]
    m = B.shape[1]
    o_lo = np.empty((n, m))
    o_hi = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            slo = 0.0
            shi = 0.0
            for k in range(a_lo.shape[1]):
                pl, ph = i_scale(B[k, j], a_lo[i, k], a_hi[i, k])
                slo = dn(slo + pl)
                shi = up(shi + ph)
            o_lo[i, j] = slo
            o_hi[i, j] = shi
    return o_lo, o_hi


@njit
def imat_mul(a_lo, a_hi, b_lo, b_hi):
    n = a_lo.shape[0]
    m = b_lo.shape[1]
    o_lo = np.empty((n, m))
    o_hi = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            slo = 0.0
            shi = 0.0
            for k in range(a_lo.shape[1]):
                pl, ph = i_mul(a_lo[i, k], a_hi[i, k], b_lo[k, j], b_hi[k, j])
                slo = dn(slo + pl)
                shi = up(shi + ph)
            o_lo[i, j] = slo
            o_hi[i, j] = shi
    return o_lo, o_hi


@njit
def imat_vec(a_lo, a_hi, r_lo, r_hi):
    n = a_lo.shape[0]
    o_lo = np.empty(n)
    o_hi = np.empty(n)
    for i in range(n):
        slo = 0.0
        shi = 0.0
        for k in range(a_lo.shape[1]):
            pl, ph = i_mul(a_lo[i, k], a_hi[i, k], r_lo[k], r_hi[k])
            slo = dn(slo + pl)
            shi = up(shi + ph)
        o_lo[i] = slo
        o_hi[i] = shi
    return o_lo, o_hi


@njit
def rigorous_inverse(B, M):
    """Interval enclosure of ``inv(B)`` from an approximate inverse ``M``.

    With ``E = I - M B`` and ``||E|| = eps < 1``:
    ``inv(B) - M = E (I - E)^-1 M``, whose entries are at most
    ``eps ||M|| / (1 - eps)`` in magnitude (infinity norms).
    Returns ``(lo, hi, ok)``.
    """
    n = B.shape[0]
    eps = 0.0
    for i in range(n):
        row = 0.0
        for j in range(n):
            slo = 1.0 if i == j else 0.0
            shi = slo
            for k in range(n):
                pl, ph = i_scale(M[i, k], B[k, j], B[k, j])
                slo = dn(slo - ph)
                shi = up(shi - pl)
            row = up(row + max(abs(slo), abs(shi)))
        eps = max(eps, row)
    lo = np.empty((n, n))
    hi = np.empty((n, n))
    if not eps < 0.5:
        return lo, hi, False
    mnorm = 0.0
    for i in range(n):
        row = 0.0
        for j in range(n):
            row = up(row + abs(M[i, j]))
        mnorm = max(mnorm, row)
    delta = up(up(eps * mnorm) / dn(1.0 - eps))
    for i in range(n):
        for j in range(n):
            lo[i, j] = dn(M[i, j] - delta)
            hi[i, j] = up(M[i, j] + delta)
    return lo, hi, True


@njit
def _subset_interior(a_lo, a_hi, b_lo, b_hi):
    for i in range(a_lo.shape[0]):
        if not (b_lo[i] < a_lo[i] and a_hi[i] < b_hi[i]):
            return False
    return True


@njit
def _all_finite(a):
    for v in a.ravel():
        if not math.isfinite(v):
            return False
    return True


@njit
def _taylor_range(c_lo, c_hi, p, h_hi):
    """Enclosure of ``sum_{i<p} tau^i c_i`` for ``tau`` in ``[0, h]``."""
    n = c_lo.shape[1]
    e_lo = c_lo[0].copy()
    e_hi = c_hi[0].copy()
    hp = 1.0
    for i in range(1, p):
        hp = up(hp * h_hi)
        for j in range(n):
            tl, th = i_scale(hp, c_lo[i, j], c_hi[i, j])
            e_lo[j] = dn(e_lo[j] + min(0.0, tl))
            e_hi[j] = up(e_hi[j] + max(0.0, th))
    return e_lo, e_hi


@njit
def _horner_vec(c_lo, c_hi, p, hl, hh):
    """``sum_{i<p} h^i c_i`` by Horner's rule with interval ``h``."""
    n = c_lo.shape[1]
    s_lo = c_lo[p - 1].copy()
    s_hi = c_hi[p - 1].copy()
    for i in range(p - 2, -1, -1):
        for j in range(n):
            ml, mh = i_mul(s_lo[j], s_hi[j], hl, hh)
            s_lo[j], s_hi[j] = i_add(ml, mh, c_lo[i, j], c_hi[i, j])
    return s_lo, s_hi


@njit
def _horner_mat(j_lo, j_hi, p, hl, hh):
    n = j_lo.shape[1]
    s_lo = j_lo[p - 1].copy()
    s_hi = j_hi[p - 1].copy()
    for i in range(p - 2, -1, -1):
        for a in range(n):
            for b in range(n):
                ml, mh = i_mul(s_lo[a, b], s_hi[a, b], hl, hh)
                s_lo[a, b], s_hi[a, b] = i_add(ml, mh, j_lo[i, a, b], j_hi[i, a, b])
    return s_lo, s_hi


@njit
def apriori_enclosure(system, X_lo, X_hi, c_lo, c_hi, t, t1, h_hi, p, max_iter):
    """High-order a-priori enclosure over ``[t, t1]``.

    ``c`` holds the coefficients 0..p-1 at the initial set ``X``. A box ``Y``
    with ``sum_{i<p} [0,h]^i c_i + [0,h]^p c_p(Y, [t, t1]) ⊂ int Y`` contains the
    solution on the whole step. Returns ``(ok, Y_lo, Y_hi, rem_lo, rem_hi)``
    where ``rem`` encloses ``c_p`` over ``Y``.
    """
    n = X_lo.shape[0]
    e_lo, e_hi = _taylor_range(c_lo, c_hi, p, h_hi)
    hp = 1.0
    for i in range(p):
        hp = up(hp * h_hi)
    y_lo = e_lo.copy()
    y_hi = e_hi.copy()
    for j in range(n):
        w = y_hi[j] - y_lo[j]
        pad = 0.1 * w + 1e-10 * max(abs(y_lo[j]), abs(y_hi[j])) + 1e-14
        y_lo[j] = dn(y_lo[j] - pad)
        y_hi[j] = up(y_hi[j] + pad)
    r_lo = np.zeros(n)
    r_hi = np.zeros(n)
    for it in range(max_iter):
        cc_lo, cc_hi, _jl, _jh = series(system, y_lo, y_hi, t, t1, p, False)
        if not (_all_finite(cc_lo) and _all_finite(cc_hi)):
            return False, y_lo, y_hi, r_lo, r_hi
        nl = np.empty(n)
        nh = np.empty(n)
        for j in range(n):
            tl, th = i_scale(hp, cc_lo[p, j], cc_hi[p, j])
            nl[j] = dn(e_lo[j] + min(0.0, tl))
            nh[j] = up(e_hi[j] + max(0.0, th))
        if _subset_interior(nl, nh, y_lo, y_hi):
            for j in range(n):
                r_lo[j] = cc_lo[p, j]
                r_hi[j] = cc_hi[p, j]
            return True, nl, nh, r_lo, r_hi
        for j in range(n):
            lo = min(nl[j], y_lo[j])
            hi = max(nh[j], y_hi[j])
            pad = 0.25 * (hi - lo) + 1e-14
            y_lo[j] = dn(lo - pad)
            y_hi[j] = up(hi + pad)
    return False, y_lo, y_hi, r_lo, r_hi


@njit
def _inf_norm(M):
    n = M.shape[0]
    out = 0.0
    for i in range(n):
        row = 0.0
        for j in range(M.shape[1]):
            row += abs(M[i, j])
        out = max(out, row)
    return out


@njit
def _normalized_columns(A):
    n = A.shape[0]
    out = A.copy()
    for b in range(n):
        nrm = 0.0
        for a in range(n):
            nrm += out[a, b] * out[a, b]
        nrm = math.sqrt(nrm)
        if nrm > 0.0:
            for a in range(n):
                out[a, b] /= nrm
    return out


@njit
def _qr_transform(Am, r_lo, r_hi):
    # order columns by their contribution to the set's extent
    n = Am.shape[0]
    score = np.empty(n)
    for b in range(n):
        nrm = 0.0
        for a in range(n):
            nrm += Am[a, b] * Am[a, b]
        score[b] = math.sqrt(nrm) * (r_hi[b] - r_lo[b])
    order = np.argsort(-score)
    P = np.empty((n, n))
    for b in range(n):
        for a in range(n):
            P[a, b] = Am[a, order[b]]
    Q, _R = np.linalg.qr(P)
    return np.ascontiguousarray(Q)


@njit
def lohner_step(system, x, B, r_lo, r_hi, t, t1, p, mode, cond_max):
    """One validated Taylor step of the set ``{x + B r}`` from ``t`` to ``t1``.

    Returns a status code and the new representation ``(x1, B1, r1)``, the
    interval hull at ``t1``, the a-priori box over ``[t, t1]`` and the Taylor
    coefficients through the centre (used for step-size prediction).
    """
    n = x.shape[0]
    hl = dn(t1 - t)
    hh = up(t1 - t)
    X_lo, X_hi = affine_eval(x, B, r_lo, r_hi)
    cmag_lo = np.zeros((p, n))
    cmag_hi = np.zeros((p, n))

    c_lo, c_hi, j_lo, j_hi = series(system, X_lo, X_hi, t, t, p - 1, True)
    if not (_all_finite(c_lo) and _all_finite(c_hi) and _all_finite(j_lo) and _all_finite(j_hi)):
        return NONFINITE, x, B, r_lo, r_hi, X_lo, X_hi, X_lo, X_hi, cmag_lo, cmag_hi
    ok, Y_lo, Y_hi, rem_lo, rem_hi = apriori_enclosure(
        system, X_lo, X_hi, c_lo, c_hi, t, t1, hh, p, 6)
    if not ok:
        return APRIORI_FAILED, x, B, r_lo, r_hi, X_lo, X_hi, Y_lo, Y_hi, cmag_lo, cmag_hi

    # remainder at the step end: h^p c_p(Y)
    hp_lo = 1.0
    hp_hi = 1.0
    for i in range(p):
        hp_lo = dn(hp_lo * hl)
        hp_hi = up(hp_hi * hh)
    z_lo = np.empty(n)
    z_hi = np.empty(n)
    for j in range(n):
        z_lo[j], z_hi[j] = i_mul(hp_lo, hp_hi, rem_lo[j], rem_hi[j])

    # Taylor polynomial through the centre point, and its Jacobian over X
    xc_lo, xc_hi, _a, _b = series(system, x, x, t, t, p - 1, False)
    phi_lo, phi_hi = _horner_vec(xc_lo, xc_hi, p, hl, hh)
    J_lo, J_hi = _horner_mat(j_lo, j_hi, p, hl, hh)
    s_lo = np.empty(n)
    s_hi = np.empty(n)
    for j in range(n):
        s_lo[j], s_hi[j] = i_add(phi_lo[j], phi_hi[j], z_lo[j], z_hi[j])
    A_lo, A_hi = imat_thin_mul(J_lo, J_hi, B)

    x1 = np.empty(n)
    e_lo = np.empty(n)
    e_hi = np.empty(n)
    for j in range(n):
        x1[j] = 0.5 * s_lo[j] + 0.5 * s_hi[j]
        e_lo[j], e_hi[j] = i_sub(s_lo[j], s_hi[j], x1[j], x1[j])

    Am = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            Am[a, b] = 0.5 * A_lo[a, b] + 0.5 * A_hi[a, b]
    inv_ok = False
    B1 = Am
    Bi_lo = Am
    Bi_hi = Am
    if mode != WRAP_QR:
        B1 = _normalized_columns(Am)
        if _all_finite(B1) and abs(np.linalg.det(B1)) > 1e-12:
            M = np.linalg.inv(B1)
            if _all_finite(M) and (mode == WRAP_PPED or _inf_norm(M) <= cond_max):
                Bi_lo, Bi_hi, inv_ok = rigorous_inverse(B1, M)
        if not inv_ok and mode == WRAP_PPED:
            return BAD_INVERSE, x, B, r_lo, r_hi, X_lo, X_hi, Y_lo, Y_hi, cmag_lo, cmag_hi
    if not inv_ok:
        B1 = _qr_transform(Am, r_lo, r_hi)
        if not _all_finite(B1):
            return NONFINITE, x, B, r_lo, r_hi, X_lo, X_hi, Y_lo, Y_hi, cmag_lo, cmag_hi
        Bi_lo, Bi_hi, inv_ok = rigorous_inverse(B1, np.ascontiguousarray(B1.T))
        if not inv_ok:
            return BAD_INVERSE, x, B, r_lo, r_hi, X_lo, X_hi, Y_lo, Y_hi, cmag_lo, cmag_hi
    C_lo, C_hi = imat_mul(Bi_lo, Bi_hi, A_lo, A_hi)
    q1_lo, q1_hi = imat_vec(C_lo, C_hi, r_lo, r_hi)
    q2_lo, q2_hi = imat_vec(Bi_lo, Bi_hi, e_lo, e_hi)
    r1_lo = np.empty(n)
    r1_hi = np.empty(n)
    for j in range(n):
        r1_lo[j], r1_hi[j] = i_add(q1_lo[j], q1_hi[j], q2_lo[j], q2_hi[j])

    # step-end hull: intersection of three valid enclosures
    b_lo, b_hi = affine_eval(x1, B1, r1_lo, r1_hi)
    d_lo, d_hi = imat_vec(A_lo, A_hi, r_lo, r_hi)
    for j in range(n):
        dl, dh = i_add(s_lo[j], s_hi[j], d_lo[j], d_hi[j])
        b_lo[j] = max(b_lo[j], dl, Y_lo[j])
        b_hi[j] = min(b_hi[j], dh, Y_hi[j])
    if not (_all_finite(r1_lo) and _all_finite(r1_hi) and _all_finite(b_lo) and _all_finite(b_hi)):
        return NONFINITE, x, B, r_lo, r_hi, X_lo, X_hi, Y_lo, Y_hi, cmag_lo, cmag_hi
    return OK, x1, B1, r1_lo, r1_hi, b_lo, b_hi, Y_lo, Y_hi, xc_lo[:p].copy(), xc_hi[:p].copy()
