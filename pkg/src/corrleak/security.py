"""Finite-key length for the correlated-leakage two-state SNS protocol.

Pipeline: equivalent intensities -> phase coefficients -> Chernoff upper
bounds on the O/B event rates -> phase-error probability -> coherent-attack
phase-error count via the de Finetti factor -> lower bound on key-round Z
events -> key length after error correction, hashing and chain-rule penalties.

Zero-key outcomes (no equivalent source, infeasible budget, saturated phase
error, negative length) are reported through ``KeyRateResult.status``; the
pipeline never raises for a physically meaningless parameter corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .bounds import (
    LogEpsilon,
    cher_lower_expectation,
    cher_upper_expectation,
    cher_upper_observation,
    ln_definetti_factor,
)
from .channel import ChannelParams, ExpectedCounts, expected_statistics
from .framework import (
    BudgetInfeasible,
    ChainBudget,
    binary_entropy,
    chain_penalty_bits,
    epsilon_hat,
)
from .source import (
    EquivalentSource,
    NoEquivalentSource,
    SourceCharacterization,
    equivalent_source,
)

FEASIBLE = "feasible"


@dataclass(frozen=True)
class PhaseCoefficients:
    c0: float
    c1: float
    c2bar: float


@dataclass(frozen=True)
class SecurityBudget:
    """Split of the total security parameter.

    ``eps_tot = 2 eps + eps_bar + eps_cor + eps0``; ``eps2``/``eps3`` feed the
    chain rule and ``definetti_x`` is the squared joint dimension.
    """

    eps_tot: LogEpsilon
    eps: LogEpsilon
    eps_bar: LogEpsilon
    eps_cor: LogEpsilon
    eps0: LogEpsilon
    eps2: LogEpsilon
    eps3: LogEpsilon
    definetti_x: int = 256

    @classmethod
    def default(cls, eps_tot: float = 1e-10, definetti_x: int = 256, **overrides) -> SecurityBudget:
        """Five-way split ``eps = eps_bar = eps_cor = eps0 = eps_tot/5`` and
        ``eps2 = eps3 = eps**2``. Any component may be overridden by a float."""
        fifth = eps_tot / 5.0
        parts = dict(eps=fifth, eps_bar=fifth, eps_cor=fifth, eps0=fifth)
        for k in ("eps", "eps_bar", "eps_cor", "eps0"):
            if overrides.get(k) is not None:
                parts[k] = overrides[k]
        eps = LogEpsilon.from_prob(parts["eps"])
        eps2 = overrides.get("eps2")
        eps3 = overrides.get("eps3")
        return cls(
            eps_tot=LogEpsilon.from_prob(eps_tot),
            eps=eps,
            eps_bar=LogEpsilon.from_prob(parts["eps_bar"]),
            eps_cor=LogEpsilon.from_prob(parts["eps_cor"]),
            eps0=LogEpsilon.from_prob(parts["eps0"]),
            eps2=eps**2 if eps2 is None else LogEpsilon.from_prob(eps2),
            eps3=eps**2 if eps3 is None else LogEpsilon.from_prob(eps3),
            definetti_x=definetti_x,
        )

    def composed_total(self) -> float:
        """``2 eps + eps_bar + eps_cor + eps0`` in plain arithmetic."""
        return 2 * self.eps.prob + self.eps_bar.prob + self.eps_cor.prob + self.eps0.prob

    def chain(self, xi: int) -> ChainBudget:
        return ChainBudget(xi=xi, eps=self.eps, eps2=self.eps2, eps3=self.eps3)


@dataclass
class KeyRateResult:
    l_max: float
    rate: float
    status: str
    n_total: float
    xi: int
    mu_equ_a: float = math.nan
    mu_equ_b: float = math.nan
    c0: float = math.nan
    c1: float = math.nan
    c2bar: float = math.nan
    p_o_up: float = math.nan
    p_b_up: float = math.nan
    p_ph: float = math.nan
    n_ph_upper: float = math.nan
    n_z_lower: float = math.nan
    e_bit: float = math.nan
    penalty_bits: float = math.nan
    eps1_log2_inv: float = math.nan
    l_raw: float = math.nan
    counts: ExpectedCounts | None = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def phase_coefficients(mu_a: float, mu_b: float) -> PhaseCoefficients:
    if mu_a < 0 or mu_b < 0:
        raise ValueError("equivalent intensities must be nonnegative")
    c0 = math.exp(-(mu_a + mu_b) / 4.0)
    c1 = 1.0 / c0
    s = c0 + c1
    c2bar = math.sqrt(max(s - 2.0 * math.exp(-mu_a / 2.0), 0.0) * max(s - 2.0 * math.exp(-mu_b / 2.0), 0.0))
    return PhaseCoefficients(c0, c1, c2bar)


def event_rate_upper_bounds(
    n_o_pe: float, n_b_pe: float, n_total: float, p_pe: float, eps_each: LogEpsilon
) -> tuple[float, float]:
    """Upper bounds on P(O, success, key round) and P(B, success, key round)."""
    if not 0.0 < p_pe < 1.0:
        raise ValueError(f"p_pe must lie strictly inside (0, 1), got {p_pe!r}")
    scale = (1.0 - p_pe) / p_pe / n_total
    return (
        scale * cher_upper_expectation(n_o_pe, eps_each),
        scale * cher_upper_expectation(n_b_pe, eps_each),
    )


def phase_error_probability(
    p_o_up: float,
    p_b_up: float,
    p_send: float,
    coeffs: PhaseCoefficients,
    p_pe: float,
    cross_factor: float = 1.0,
) -> float:
    """Upper bound on the per-round phase-error probability in key rounds.

    ``p_o_up``/``p_b_up`` are joint probabilities over all rounds, so they are
    first divided by ``1 - p_pe`` to get per-key-round rates; the bound is
    then scaled back by ``1 - p_pe``. ``cross_factor`` multiplies the two
    ``c_{0,1} * c2bar`` cross terms (1 is the tight form; 2 a looser variant).
    """
    if not 0.0 < p_send < 1.0:
        raise ValueError(f"p_send must lie strictly inside (0, 1), got {p_send!r}")
    if p_o_up < 0 or p_b_up < 0:
        raise ValueError("event rates must be nonnegative")
    p1, p0 = p_send, 1.0 - p_send
    key = 1.0 - p_pe
    o = p_o_up / key / (p0 * p0)
    b = p_b_up / key / (p1 * p1)
    c0, c1, c2 = coeffs.c0, coeffs.c1, coeffs.c2bar
    so, sb = math.sqrt(o), math.sqrt(b)
    inner = (
        c0 * c0 * o
        + c1 * c1 * b
        + c2 * c2
        + 2.0 * c0 * c1 * so * sb
        + cross_factor * (c0 * c2 * so + c1 * c2 * sb)
    )
    return min(max(key * p0 * p1 / 2.0 * inner, 0.0), 1.0)


def estimation_epsilon(eps1: LogEpsilon, n_total: float, definetti_x: int) -> LogEpsilon:
    """Failure probability of each phase-chain estimate: ``eps1**2 / (3 g)``."""
    ln_inv = 2.0 * eps1.ln_inv + math.log(3.0) + ln_definetti_factor(int(n_total), definetti_x)
    return LogEpsilon.from_ln_inv(ln_inv)


def phase_error_count(n_total: float, p_ph: float, eps1: LogEpsilon, definetti_x: int = 256) -> float:
    """Coherent-attack upper bound on the number of phase errors."""
    return cher_upper_observation(n_total * p_ph, estimation_epsilon(eps1, n_total, definetti_x))


def z_count_lower(n_z_pe: float, p_pe: float, eps0: LogEpsilon) -> float:
    """Lower bound on key-round Z events from the PE-round count."""
    if not 0.0 < p_pe < 1.0:
        raise ValueError(f"p_pe must lie strictly inside (0, 1), got {p_pe!r}")
    return max(cher_lower_expectation(n_z_pe, eps0) / p_pe - n_z_pe, 0.0)


def _as_equivalent(src) -> EquivalentSource:
    if isinstance(src, EquivalentSource):
        return src
    return equivalent_source(src)


def key_length(
    counts: ExpectedCounts,
    source_a: SourceCharacterization | EquivalentSource,
    source_b: SourceCharacterization | EquivalentSource,
    budget: SecurityBudget,
    chain: ChainBudget,
    ec_efficiency: float,
    p_send: float,
    cross_factor: float = 1.0,
) -> KeyRateResult:
    """Secret key length ``l_max`` with every intermediate bound."""
    if ec_efficiency < 1.0:
        raise ValueError(f"error-correction efficiency must be >= 1, got {ec_efficiency!r}")
    n = counts.n_total
    res = KeyRateResult(l_max=0.0, rate=0.0, status=FEASIBLE, n_total=n, xi=chain.xi, counts=counts)
    res.e_bit = counts.e_bit
    res.penalty_bits = chain_penalty_bits(chain)

    try:
        eq_a = _as_equivalent(source_a)
        eq_b = _as_equivalent(source_b)
    except NoEquivalentSource:
        res.status = "zero-key(no-equivalent-source)"
        return res
    res.mu_equ_a, res.mu_equ_b = eq_a.mu_equ, eq_b.mu_equ

    try:
        eps1 = epsilon_hat(chain)
    except BudgetInfeasible:
        res.status = "zero-key(budget-infeasible)"
        return res
    res.eps1_log2_inv = eps1.log2_inv

    coeffs = phase_coefficients(eq_a.mu_equ, eq_b.mu_equ)
    res.c0, res.c1, res.c2bar = coeffs.c0, coeffs.c1, coeffs.c2bar

    # P_O, P_B and n_ph each take an equal share eps1^2 / (3 g)
    eps_each = estimation_epsilon(eps1, n, budget.definetti_x)
    res.p_o_up, res.p_b_up = event_rate_upper_bounds(counts.n_o_pe, counts.n_b_pe, n, counts.p_pe, eps_each)
    res.p_ph = phase_error_probability(res.p_o_up, res.p_b_up, p_send, coeffs, counts.p_pe, cross_factor)
    res.n_ph_upper = cher_upper_observation(n * res.p_ph, eps_each)
    res.n_z_lower = z_count_lower(counts.n_z_pe, counts.p_pe, budget.eps0)

    if res.n_z_lower <= 0.0 or res.n_ph_upper / res.n_z_lower >= 0.5:
        res.status = "zero-key(phase-error-saturated)"
        return res

    privacy = res.n_z_lower * (1.0 - binary_entropy(res.n_ph_upper / res.n_z_lower))
    leak_ec = ec_efficiency * counts.n_succ_key * binary_entropy(counts.e_bit)
    hashing = 1.0 + budget.eps_cor.log2_inv
    smoothing = 2.0 * (budget.eps_bar.log2_inv - 1.0)
    res.l_raw = privacy - leak_ec - hashing - smoothing - res.penalty_bits
    if res.l_raw <= 0.0:
        deficits = {
            "error-correction": leak_ec,
            "chain-penalty": res.penalty_bits,
            "hashing+smoothing": hashing + smoothing,
        }
        res.status = f"zero-key(negative-length:{max(deficits, key=deficits.get)})"
        return res
    res.l_max = res.l_raw
    res.rate = res.l_max / n
    return res


def evaluate_point(
    channel: ChannelParams,
    n_total: float,
    xi: int,
    p_send: float,
    mu_max: float,
    p_pe: float,
    budget: SecurityBudget | None = None,
    ec_efficiency: float = 1.16,
    cross_factor: float = 1.0,
) -> KeyRateResult:
    """Key length for symmetric parties sharing one ``(mu_max, p_send)`` pair."""
    budget = budget or SecurityBudget.default()
    src = SourceCharacterization.from_intensity(xi, mu_max, channel.extinction, p_send)
    counts = expected_statistics(n_total, p_pe, src, src, mu_max, mu_max, channel)
    return key_length(counts, src, src, budget, budget.chain(xi), ec_efficiency, p_send, cross_factor)
