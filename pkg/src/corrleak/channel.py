"""Honest-channel statistics for a two-state SNS link with an interfering node.

Each party sends a phase-randomisable weak coherent pulse (``mu`` when
sending, ``extinction * mu`` otherwise) through a lossy channel to a 50:50
beam splitter. The node is phase-locked so that the two pulses interfere
destructively at the right detector; imperfect locking enters as visibility
``1 - 2 * misalignment``. A round succeeds when only the right detector clicks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .source import SourceCharacterization


@dataclass(frozen=True)
class ChannelParams:
    att_a_db: float
    att_b_db: float
    dark_rate: float = 1e-9
    misalignment: float = 0.01
    extinction: float = 1e-3

    def __post_init__(self):
        for name in ("att_a_db", "att_b_db"):
            v = getattr(self, name)
            if not v >= 0.0:
                raise ValueError(f"{name} must be >= 0 dB, got {v!r}")
        if not 0.0 <= self.dark_rate < 1.0:
            raise ValueError(f"dark_rate must lie in [0, 1), got {self.dark_rate!r}")
        if not 0.0 <= self.misalignment <= 0.5:
            raise ValueError(f"misalignment must lie in [0, 1/2], got {self.misalignment!r}")
        if not 0.0 <= self.extinction <= 1.0:
            raise ValueError(f"extinction must lie in [0, 1], got {self.extinction!r}")

    @classmethod
    def symmetric(cls, att_db: float, **kw) -> ChannelParams:
        return cls(att_a_db=att_db, att_b_db=att_db, **kw)

    @property
    def eta_a(self) -> float:
        return 10.0 ** (-self.att_a_db / 10.0)

    @property
    def eta_b(self) -> float:
        return 10.0 ** (-self.att_b_db / 10.0)

    @property
    def visibility(self) -> float:
        return 1.0 - 2.0 * self.misalignment


@dataclass(frozen=True)
class ExpectedCounts:
    n_total: float
    p_pe: float
    n_z_pe: float
    n_o_pe: float
    n_b_pe: float
    n_z_key: float
    n_o_key: float
    n_b_key: float

    @property
    def n_succ_key(self) -> float:
        return self.n_z_key + self.n_o_key + self.n_b_key

    @property
    def e_bit(self) -> float:
        n = self.n_succ_key
        return (self.n_o_key + self.n_b_key) / n if n > 0 else 0.0


def port_intensities(a: float, b: float, visibility: float) -> tuple[float, float]:
    """Mean photon numbers reaching the (right, left) detectors."""
    cross = visibility * math.sqrt(a * b)
    mean = 0.5 * (a + b)
    return max(mean - cross, 0.0), mean + cross


def success_probability(intensity_a: float, intensity_b: float, params: ChannelParams) -> float:
    """Probability that the right detector clicks and the left one stays silent."""
    if intensity_a < 0 or intensity_b < 0:
        raise ValueError("intensities must be nonnegative")
    i_r, i_l = port_intensities(intensity_a, intensity_b, params.visibility)
    no_dark = 1.0 - params.dark_rate
    right_click = -math.expm1(-i_r + math.log1p(-params.dark_rate))
    left_silent = no_dark * math.exp(-i_l)
    return right_click * left_silent


def class_probabilities(p_send_a: float, p_send_b: float) -> dict[tuple[int, int], float]:
    """Joint probability of each (r_A, r_B) setting pair."""
    pa = {1: p_send_a, 0: 1.0 - p_send_a}
    pb = {1: p_send_b, 0: 1.0 - p_send_b}
    return {(ra, rb): pa[ra] * pb[rb] for ra in (0, 1) for rb in (0, 1)}


def expected_statistics(
    n_total: float,
    p_pe: float,
    src_a: SourceCharacterization,
    src_b: SourceCharacterization,
    mu_a: float,
    mu_b: float,
    params: ChannelParams,
) -> ExpectedCounts:
    """Expected successful Z/O/B counts in the PE and key-extraction rounds."""
    if n_total < 1:
        raise ValueError(f"round count must be >= 1, got {n_total!r}")
    if not 0.0 < p_pe < 1.0:
        raise ValueError(f"p_pe must lie strictly inside (0, 1), got {p_pe!r}")
    if mu_a < 0 or mu_b < 0:
        raise ValueError("intensities must be nonnegative")
    arrive_a = {1: mu_a * params.eta_a, 0: params.extinction * mu_a * params.eta_a}
    arrive_b = {1: mu_b * params.eta_b, 0: params.extinction * mu_b * params.eta_b}
    joint = class_probabilities(src_a.p_send, src_b.p_send)
    rate = {
        k: p * success_probability(arrive_a[k[0]], arrive_b[k[1]], params)
        for k, p in joint.items()
    }
    z = rate[(1, 0)] + rate[(0, 1)]
    o = rate[(0, 0)]
    b = rate[(1, 1)]
    pe = n_total * p_pe
    key = n_total * (1.0 - p_pe)
    return ExpectedCounts(
        n_total=n_total,
        p_pe=p_pe,
        n_z_pe=pe * z,
        n_o_pe=pe * o,
        n_b_pe=pe * b,
        n_z_key=key * z,
        n_o_key=key * o,
        n_b_key=key * b,
    )
