"""Key-rate maximisation over send probability, intensity cap and PE fraction.

A coarse grid scan is followed by bracket refinement: at each depth level the
search box is shrunk around the incumbent by a fixed factor and re-gridded.
The objective has cliffs where the key length drops to zero, which rules out
gradient methods; evaluations are cheap, so brute force is fine.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams
from .security import KeyRateResult, SecurityBudget, evaluate_point


@dataclass(frozen=True)
class Dimension:
    """One search axis. ``lo == hi`` pins the parameter."""

    lo: float
    hi: float
    points: int = 16
    log: bool = False

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty range [{self.lo}, {self.hi}]")
        if self.points < 2 and self.lo != self.hi:
            raise ValueError("a free dimension needs at least 2 grid points")
        if self.log and self.lo <= 0:
            raise ValueError("log-spaced dimension needs a positive lower end")

    @property
    def fixed(self) -> bool:
        return self.lo == self.hi

    def grid(self, lo: float, hi: float) -> np.ndarray:
        if self.fixed or lo == hi:
            return np.array([lo])
        if self.log:
            return np.geomspace(lo, hi, self.points)
        return np.linspace(lo, hi, self.points)

    def shrink(self, center: float, lo: float, hi: float, factor: float) -> tuple[float, float]:
        """Bracket of 1/factor the current width around ``center``, clipped to the axis."""
        if self.fixed:
            return self.lo, self.hi
        if self.log:
            half = (math.log(hi) - math.log(lo)) / (2.0 * factor)
            c = math.log(center)
            return max(self.lo, math.exp(c - half)), min(self.hi, math.exp(c + half))
        half = (hi - lo) / (2.0 * factor)
        return max(self.lo, center - half), min(self.hi, center + half)


def _open_unit(d: Dimension, name: str):
    if not (0.0 < d.lo and d.hi < 1.0):
        raise ValueError(f"{name} range must lie strictly inside (0, 1), got [{d.lo}, {d.hi}]")


@dataclass(frozen=True)
class SearchSpace:
    p_send: Dimension = field(default_factory=lambda: Dimension(1e-3, 0.5, 16, log=True))
    mu_max: Dimension = field(default_factory=lambda: Dimension(1e-6, 0.5, 16, log=True))
    p_pe: Dimension = field(default_factory=lambda: Dimension(0.01, 0.9, 16, log=True))
    depth: int = 3
    shrink: float = 4.0

    def __post_init__(self):
        _open_unit(self.p_send, "p_send")
        _open_unit(self.p_pe, "p_pe")
        if not self.mu_max.lo > 0:
            raise ValueError("mu_max range must be positive")
        if self.depth < 0:
            raise ValueError("refinement depth must be >= 0")
        if not self.shrink > 1.0:
            raise ValueError("shrink factor must exceed 1")

    @classmethod
    def single(cls, p_send: float, mu_max: float, p_pe: float) -> SearchSpace:
        return cls(
            Dimension(p_send, p_send, 1),
            Dimension(mu_max, mu_max, 1),
            Dimension(p_pe, p_pe, 1),
            depth=0,
        )


@dataclass
class OptimizedPoint:
    result: KeyRateResult
    p_send: float
    mu_max: float
    p_pe: float
    evaluations: int = 0
    history: list[float] = field(default_factory=list, repr=False)


def optimize_point(
    channel: ChannelParams,
    n_total: float,
    xi: int,
    budget: SecurityBudget | None = None,
    ec_efficiency: float = 1.16,
    space: SearchSpace | None = None,
) -> OptimizedPoint:
    """Best key rate over ``space`` for symmetric parties."""
    budget = budget or SecurityBudget.default()
    space = space or SearchSpace()
    dims = (space.p_send, space.mu_max, space.p_pe)
    box = [(d.lo, d.hi) for d in dims]
    cache: dict[tuple[float, float, float], KeyRateResult] = {}
    best: OptimizedPoint | None = None
    history = []

    for _level in range(space.depth + 1):
        grids = [d.grid(lo, hi) for d, (lo, hi) in zip(dims, box)]
        for ps, mu, pe in itertools.product(*grids):
            key = (float(ps), float(mu), float(pe))
            if key in cache:
                continue
            r = evaluate_point(channel, n_total, xi, *key, budget=budget, ec_efficiency=ec_efficiency)
            cache[key] = r
            # strict improvement keeps the first-found maximiser (deterministic)
            if best is None or r.rate > best.result.rate:
                best = OptimizedPoint(r, *key)
        history.append(best.result.rate)
        center = (best.p_send, best.mu_max, best.p_pe)
        box = [d.shrink(c, lo, hi, space.shrink) for d, c, (lo, hi) in zip(dims, center, box)]

    best.evaluations = len(cache)
    best.history = history
    return best
