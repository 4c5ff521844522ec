"""Reduction of a correlated leaky source to an equivalent i.i.d. coherent source.

The only device assumptions are a correlation range ``xi`` and lower bounds on
the vacuum weight of the emitted state for each setting. Correlations shrink
those bounds by ``(p0 sqrt(v0) + p1 sqrt(v1))**(2 xi)``; the adjusted bounds then
fix the intensity ``mu_equ`` of a coherent state whose security dominates the
real source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class NoEquivalentSource(ValueError):
    """The adjusted vacuum bounds are too weak to define ``mu_equ``.

    Callers evaluating key rates should treat this as a zero-key outcome.
    """


def _unit(x: float, name: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")
    return x


@dataclass(frozen=True)
class SourceCharacterization:
    xi: int
    v0: float
    v1: float
    p_send: float

    def __post_init__(self):
        if int(self.xi) != self.xi or self.xi < 0:
            raise ValueError(f"correlation range must be a nonnegative integer, got {self.xi!r}")
        object.__setattr__(self, "xi", int(self.xi))
        object.__setattr__(self, "v0", _unit(self.v0, "v0"))
        object.__setattr__(self, "v1", _unit(self.v1, "v1"))
        if not 0.0 < self.p_send < 1.0:
            raise ValueError(f"p_send must lie strictly inside (0, 1), got {self.p_send!r}")

    @property
    def p_not_send(self) -> float:
        return 1.0 - self.p_send

    @classmethod
    def from_intensity(cls, xi: int, mu_max: float, extinction: float, p_send: float):
        v0, v1 = vacuum_bounds_from_intensity(mu_max, extinction)
        return cls(xi=xi, v0=v0, v1=v1, p_send=p_send)


@dataclass(frozen=True)
class EquivalentSource:
    mu_equ: float
    v0_xi: float
    v1_xi: float


def correlation_adjusted_vacuum(src: SourceCharacterization) -> tuple[float, float]:
    """Vacuum bounds after accounting for ``xi`` correlated predecessors."""
    if src.xi == 0:
        return src.v0, src.v1
    bracket = src.p_not_send * math.sqrt(src.v0) + src.p_send * math.sqrt(src.v1)
    if bracket <= 0.0:
        return 0.0, 0.0
    shrink = math.exp(2 * src.xi * math.log(bracket))
    return src.v0 * shrink, src.v1 * shrink


def equivalent_intensity(v0_xi: float, v1_xi: float) -> float:
    """``mu_equ`` from ``exp(-mu) = (sqrt(v0 v1) - sqrt((1-v0)(1-v1)))**2``."""
    v0_xi = _unit(v0_xi, "v0_xi")
    v1_xi = _unit(v1_xi, "v1_xi")
    if v0_xi == 0.0 or v1_xi == 0.0:
        raise NoEquivalentSource("no equivalent source: a vacuum bound is zero")
    ratio = math.sqrt((1.0 - v0_xi) * (1.0 - v1_xi) / (v0_xi * v1_xi))
    if ratio >= 1.0:
        raise NoEquivalentSource(
            "no equivalent source: sqrt(v0*v1) must exceed sqrt((1-v0)(1-v1))"
        )
    # -ln(v0 v1) - 2 ln(1 - ratio), written to stay accurate near mu = 0
    return -math.log(v0_xi) - math.log(v1_xi) - 2.0 * math.log1p(-ratio)


def equivalent_source(src: SourceCharacterization) -> EquivalentSource:
    v0_xi, v1_xi = correlation_adjusted_vacuum(src)
    return EquivalentSource(equivalent_intensity(v0_xi, v1_xi), v0_xi, v1_xi)


def vacuum_bounds_from_intensity(mu_max: float, extinction: float) -> tuple[float, float]:
    """Vacuum bounds implied by an intensity cap ``mu_max``.

    The not-send pulse carries ``extinction * mu_max`` photons on average.
    """
    if not mu_max >= 0.0:
        raise ValueError(f"intensity must be nonnegative, got {mu_max!r}")
    extinction = _unit(extinction, "extinction")
    return math.exp(-extinction * mu_max), math.exp(-mu_max)
