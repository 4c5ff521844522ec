"""Straight-line high-precision re-evaluation of the key-length formulas.

Written independently of the package: every quantity is recomputed from raw
inputs with mpmath at 50 digits, with no shared helpers. Failure probabilities
are carried as mpf values directly (mpmath has no underflow at these scales).
"""

import mpmath as mp

mp.mp.dps = 50


def cher_up_exp(x, eps):
    L = mp.log(1 / mp.mpf(eps))
    x = mp.mpf(x)
    return x + L + mp.sqrt(L**2 + 2 * x * L)


def cher_low_exp(x, eps):
    L = mp.log(1 / mp.mpf(eps))
    x = mp.mpf(x)
    return max(x + L / 2 - mp.sqrt(L**2 + 8 * x * L) / 2, mp.mpf(0))


def cher_up_obs(e, eps):
    L = mp.log(1 / mp.mpf(eps))
    e = mp.mpf(e)
    return e + L / 2 + mp.sqrt(L**2 + 8 * e * L) / 2


def cher_low_obs(e, eps):
    L = mp.log(1 / mp.mpf(eps))
    e = mp.mpf(e)
    return max(e - mp.sqrt(2 * e * L), mp.mpf(0))


def h(x):
    x = mp.mpf(x)
    if x == 0 or x == 1:
        return mp.mpf(0)
    return -x * mp.log(x, 2) - (1 - x) * mp.log(1 - x, 2)


def ln_binom(n, k):
    # exact integer binomial for small arguments, loggamma beyond
    n, k = int(n), int(k)
    if n <= 20000:
        return mp.log(mp.binomial(n, k))
    return mp.loggamma(n + 1) - mp.loggamma(k + 1) - mp.loggamma(n - k + 1)


def eps1(xi, eps, eps2, eps3):
    eps, eps2, eps3 = mp.mpf(eps), mp.mpf(eps2), mp.mpf(eps3)
    base = (eps - xi * eps2) / (2 * xi + 1) - eps3
    return base ** (xi + 1)


def adjusted_vacuum(xi, v0, v1, p1):
    v0, v1, p1 = mp.mpf(v0), mp.mpf(v1), mp.mpf(p1)
    bracket = (1 - p1) * mp.sqrt(v0) + p1 * mp.sqrt(v1)
    return v0 * bracket ** (2 * xi), v1 * bracket ** (2 * xi)


def mu_equ(v0, v1):
    d = mp.sqrt(v0 * v1) - mp.sqrt((1 - v0) * (1 - v1))
    if d <= 0:
        return None
    return -2 * mp.log(d)


def success(a, b, ed, pd):
    a, b, ed, pd = mp.mpf(a), mp.mpf(b), mp.mpf(ed), mp.mpf(pd)
    vis = 1 - 2 * ed
    ir = (a + b) / 2 - vis * mp.sqrt(a * b)
    il = (a + b) / 2 + vis * mp.sqrt(a * b)
    return (1 - (1 - pd) * mp.exp(-ir)) * ((1 - pd) * mp.exp(-il))


def counts(n, p_pe, p1a, p1b, mua, mub, att_a, att_b, pd, ed, delta):
    eta_a = mp.mpf(10) ** (-mp.mpf(att_a) / 10)
    eta_b = mp.mpf(10) ** (-mp.mpf(att_b) / 10)
    p1a, p1b = mp.mpf(p1a), mp.mpf(p1b)
    mua, mub, delta = mp.mpf(mua), mp.mpf(mub), mp.mpf(delta)
    ia = {1: mua * eta_a, 0: delta * mua * eta_a}
    ib = {1: mub * eta_b, 0: delta * mub * eta_b}
    pa = {1: p1a, 0: 1 - p1a}
    pb = {1: p1b, 0: 1 - p1b}
    q = {}
    for ra in (0, 1):
        for rb in (0, 1):
            q[(ra, rb)] = n * pa[ra] * pb[rb] * success(ia[ra], ib[rb], ed, pd)
    z = q[(1, 0)] + q[(0, 1)]
    o = q[(0, 0)]
    b = q[(1, 1)]
    p_pe = mp.mpf(p_pe)
    out = {
        "n_z_pe": z * p_pe, "n_o_pe": o * p_pe, "n_b_pe": b * p_pe,
        "n_z_key": z * (1 - p_pe), "n_o_key": o * (1 - p_pe), "n_b_key": b * (1 - p_pe),
    }
    tot = out["n_z_key"] + out["n_o_key"] + out["n_b_key"]
    out["n_succ_key"] = tot
    out["e_bit"] = (out["n_o_key"] + out["n_b_key"]) / tot if tot > 0 else mp.mpf(0)
    return out


def pipeline(n, xi, p_send, mu_max, p_pe, att_a, att_b, pd=1e-9, ed=0.01,
             delta=1e-3, eps_tot=1e-10, f_ec=1.16, x=256):
    """Full key length at one point; returns dict of intermediates or None."""
    n = mp.mpf(n)
    p1 = mp.mpf(p_send)
    p0 = 1 - p1
    mu = mp.mpf(mu_max)
    eps = eps_bar = eps_cor = eps0 = mp.mpf(eps_tot) / 5
    eps2 = eps3 = eps**2

    v1 = mp.exp(-mu)
    v0 = mp.exp(-mp.mpf(delta) * mu)
    v0x, v1x = adjusted_vacuum(xi, v0, v1, p1)
    m = mu_equ(v0x, v1x)
    if m is None:
        return None

    c = counts(n, p_pe, p1, p1, mu, mu, att_a, att_b, pd, ed, delta)

    c0 = mp.exp(-(m + m) / 4)
    c1 = 1 / c0
    c2 = mp.sqrt((c0 + c1 - 2 * mp.exp(-m / 2)) * (c0 + c1 - 2 * mp.exp(-m / 2)))

    e1 = eps1(xi, eps, eps2, eps3)
    ln_g = ln_binom(n + x - 1, n) if n <= 20000 else (
        mp.loggamma(n + x) - mp.loggamma(n + 1) - mp.loggamma(x))
    eps_ph = e1**2
    # each of the three estimates consumes eps_ph / (3 g)
    eps_each = eps_ph / (3 * mp.exp(ln_g))

    p_pe = mp.mpf(p_pe)
    po = ((1 - p_pe) / p_pe) * cher_up_exp(c["n_o_pe"], eps_each) / n
    pb = ((1 - p_pe) / p_pe) * cher_up_exp(c["n_b_pe"], eps_each) / n

    # conditional-on-key-round rates, then scaled back by (1 - p_pe)
    to = po / (1 - p_pe)
    tb = pb / (1 - p_pe)
    inner = (c0**2 * to / p0**2 + c1**2 * tb / p1**2 + c2**2
             + 2 * c0 * c1 * mp.sqrt(to * tb / (p0**2 * p1**2))
             + c0 * c2 * mp.sqrt(to / p0**2) + c1 * c2 * mp.sqrt(tb / p1**2))
    pph = min((1 - p_pe) * p1 * p0 / 2 * inner, mp.mpf(1))

    nph = cher_up_obs(n * pph, eps_each)
    nz_low = max(cher_low_exp(c["n_z_pe"], eps0) / p_pe - c["n_z_pe"], mp.mpf(0))

    penalty = 2 * xi * mp.log(1 / eps2, 2) + 2 * (xi + 1) * mp.log(1 / eps3, 2)
    out = {
        "mu_equ": m, "c0": c0, "c1": c1, "c2bar": c2,
        "p_o_up": po, "p_b_up": pb, "p_ph": pph, "n_ph_upper": nph,
        "n_z_lower": nz_low, "e_bit": c["e_bit"], "penalty_bits": penalty,
        "eps1_log2_inv": mp.log(1 / e1, 2), "counts": c,
    }
    if nz_low <= 0 or nph / nz_low >= mp.mpf(1) / 2:
        out["l_raw"] = None
        return out
    l_raw = (nz_low * (1 - h(nph / nz_low))
             - f_ec * c["n_succ_key"] * h(c["e_bit"])
             - mp.log(2 / eps_cor, 2)
             - 2 * mp.log(1 / (2 * eps_bar), 2)
             - penalty)
    out["l_raw"] = l_raw
    return out
