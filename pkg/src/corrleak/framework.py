"""Entropy budget for correlation-range-limited sources.

A correlated raw key is split into ``xi + 1`` interleaved parts. Each link of
the chain rule costs ``f = 2 log2(1/eps2)`` bits and each estimable/unestimable
split costs ``f' = 2 log2(1/eps3)`` bits. The smoothing that survives the
chain, ``eps_hat``, sets the failure probability of the phase-error estimate.

All differences of failure probabilities are taken in ratio form relative to
the largest term, so nothing is exponentiated that might underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .bounds import LN2, LogEpsilon


class BudgetInfeasible(ValueError):
    """The epsilon ledger leaves no room for the requested smoothing."""


def _log2_inv_of_difference(lead: LogEpsilon, terms: Sequence[tuple[float, LogEpsilon]]) -> float:
    """``log2(1 / (lead - sum(c * t)))`` evaluated relative to ``lead``."""
    rest = 0.0
    for coeff, t in terms:
        if coeff:
            # ratio t / lead; underflows harmlessly to 0 when negligible
            rest += coeff * 2.0 ** min(lead.log2_inv - t.log2_inv, 64.0)
    if not rest < 1.0:
        raise BudgetInfeasible("difference of failure probabilities is not positive")
    return lead.log2_inv - math.log1p(-rest) / LN2


@dataclass(frozen=True)
class ChainBudget:
    """Correlation range plus the three smoothing parameters of the chain.

    ``eps`` is the total smoothing, ``eps2`` the per-link chain parameter and
    ``eps3`` the per-part split parameter.
    """

    xi: int
    eps: LogEpsilon
    eps2: LogEpsilon
    eps3: LogEpsilon
    keep_split_terms: bool = True

    def __post_init__(self):
        if int(self.xi) != self.xi or self.xi < 0:
            raise ValueError(f"correlation range must be a nonnegative integer, got {self.xi!r}")
        object.__setattr__(self, "xi", int(self.xi))
        for name in ("eps", "eps2", "eps3"):
            if not isinstance(getattr(self, name), LogEpsilon):
                raise TypeError(f"{name} must be a LogEpsilon")

    @property
    def f_link(self) -> float:
        return 2.0 * self.eps2.log2_inv

    @property
    def f_split(self) -> float:
        return 2.0 * self.eps3.log2_inv if self.keep_split_terms else 0.0

    def is_feasible(self) -> bool:
        try:
            epsilon_hat(self)
        except BudgetInfeasible:
            return False
        return True


def epsilon_hat(budget: ChainBudget) -> LogEpsilon:
    """Surviving smoothing ``((eps - xi eps2)/(2 xi + 1) - eps3)**(xi + 1)``."""
    xi = budget.xi
    eps3 = budget.eps3 if budget.keep_split_terms else None
    # base = eps/(2xi+1) * (1 - xi*eps2/eps - (2xi+1)*eps3/eps)
    terms = [(float(xi), budget.eps2)]
    if eps3 is not None:
        terms.append((float(2 * xi + 1), eps3))
    try:
        base_log2_inv = _log2_inv_of_difference(budget.eps, terms)
    except BudgetInfeasible:
        if xi and xi * 2.0 ** min(budget.eps.log2_inv - budget.eps2.log2_inv, 64.0) >= 1.0:
            msg = "budget infeasible: xi*eps2 < eps is violated"
        else:
            msg = "budget infeasible: eps3 < (eps - xi*eps2)/(2*xi + 1) is violated"
        raise BudgetInfeasible(msg) from None
    base_log2_inv += math.log2(2 * xi + 1)
    return LogEpsilon((xi + 1) * base_log2_inv)


def chain_penalty_bits(budget: ChainBudget) -> float:
    """Bits lost to the chain rule: ``xi f + (xi + 1) f'``."""
    return budget.xi * budget.f_link + (budget.xi + 1) * budget.f_split


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def composed_min_entropy(n: float, e_ph_upper: float, budget: ChainBudget) -> float:
    """Lower bound on the smooth min-entropy of the whole correlated key.

    ``n (1 - h(e)) - penalty``; the entropy credit is zero once the phase error
    bound passes one half.
    """
    if n < 0:
        raise ValueError(f"bit count must be nonnegative, got {n!r}")
    if not 0.0 <= e_ph_upper <= 1.0:
        raise ValueError(f"phase error rate must lie in [0, 1], got {e_ph_upper!r}")
    credit = 0.0 if e_ph_upper > 0.5 else n * (1.0 - binary_entropy(e_ph_upper))
    return credit - chain_penalty_bits(budget)


def compose_partition_entropies(
    parts: Sequence[float],
    eps: LogEpsilon | None = None,
    links: Sequence[tuple[LogEpsilon, LogEpsilon]] = (),
) -> float:
    """Sum per-part entropies minus the chain-rule penalty of each link.

    ``links[i] = (eps_i, eps_i')`` for ``i = 1..len(parts) - 1``. The penalty of
    link ``i`` is ``2 log2(1 / (prev - 2 eps_i - eps_i'))`` where ``prev`` is
    ``eps`` for the first link and ``eps_{i-1}'`` afterwards.
    """
    parts = list(parts)
    if not parts:
        raise ValueError("need at least one part")
    if len(links) != len(parts) - 1:
        raise ValueError(f"{len(parts)} parts need {len(parts) - 1} links, got {len(links)}")
    if links and eps is None:
        raise ValueError("the total smoothing eps is required when links are given")
    total = math.fsum(parts)
    prev = eps
    for i, (e_i, e_i_prime) in enumerate(links, start=1):
        try:
            gap = _log2_inv_of_difference(prev, [(2.0, e_i), (1.0, e_i_prime)])
        except BudgetInfeasible:
            label = "eps" if i == 1 else f"eps'_{i - 1}"
            raise BudgetInfeasible(
                f"budget infeasible at link {i}: {label} - 2*eps_{i} - eps'_{i} must be positive"
            ) from None
        total -= 2.0 * gap
        prev = e_i_prime
    return total
