"""Seeded photon-level simulation of the honest channel.

Used only to validate the closed-form expected counts in :mod:`corrleak.channel`.
Every round draws the two settings, the PE tag, Poissonian photon numbers at
each beam-splitter output and Bernoulli dark counts, then applies the
threshold-detector success rule.
"""

from __future__ import annotations

import numpy as np

from .channel import ChannelParams

COUNT_KEYS = ("n_z_pe", "n_o_pe", "n_b_pe", "n_z_key", "n_o_key", "n_b_key")


def _detect(rng, i_r, i_l, dark_rate):
    m = i_r.shape[0]
    right = rng.poisson(i_r) > 0
    left = rng.poisson(i_l) > 0
    if dark_rate > 0:
        right |= rng.random(m) < dark_rate
        left |= rng.random(m) < dark_rate
    return right & ~left


def _ports(a, b, visibility):
    cross = visibility * np.sqrt(a * b)
    mean = 0.5 * (a + b)
    return np.maximum(mean - cross, 0.0), mean + cross


def simulate_success(a, b, params: ChannelParams, n_samples, seed=0, chunk=10_000_000):
    """Fraction of rounds with only the right detector clicking."""
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        i_r, i_l = _ports(np.full(m, float(a)), np.full(m, float(b)), params.visibility)
        hits += int(_detect(rng, i_r, i_l, params.dark_rate).sum())
        done += m
    return hits / n_samples


def simulate_counts(
    n_rounds: int,
    p_pe: float,
    p_send_a: float,
    p_send_b: float,
    mu_a: float,
    mu_b: float,
    params: ChannelParams,
    seed: int = 0,
    chunk: int = 10_000_000,
) -> dict[str, int]:
    """Observed successful Z/O/B counts split into PE and key rounds."""
    rng = np.random.default_rng(seed)
    out = dict.fromkeys(COUNT_KEYS, 0)
    done = 0
    while done < n_rounds:
        m = min(chunk, n_rounds - done)
        ra = rng.random(m) < p_send_a
        rb = rng.random(m) < p_send_b
        pe = rng.random(m) < p_pe
        ia = np.where(ra, mu_a, params.extinction * mu_a) * params.eta_a
        ib = np.where(rb, mu_b, params.extinction * mu_b) * params.eta_b
        i_r, i_l = _ports(ia, ib, params.visibility)
        ok = _detect(rng, i_r, i_l, params.dark_rate)
        z = ok & (ra ^ rb)
        o = ok & ~ra & ~rb
        b = ok & ra & rb
        for name, mask in (("z", z), ("o", o), ("b", b)):
            n_pe = int((mask & pe).sum())
            out[f"n_{name}_pe"] += n_pe
            out[f"n_{name}_key"] += int(mask.sum()) - n_pe
        done += m
    return out
