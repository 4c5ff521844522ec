"""Log-domain failure probabilities, Chernoff bounds and the de Finetti factor.

Failure probabilities in this package are always carried as their exponent
``log2(1/eps)``. Values such as ``2**-46000`` appear routinely at large
correlation ranges and cannot be represented as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

LN2 = math.log(2.0)

# largest exponent for which 2**-x is still a normal double
_FLOAT_SAFE_LOG2 = 1000.0


@dataclass(frozen=True, order=True)
class LogEpsilon:
    """A failure probability ``eps`` stored as ``log2_inv = log2(1/eps)``.

    Multiplying probabilities adds exponents, raising to a power scales the
    exponent. Use :meth:`from_prob` for ordinary probabilities and
    :meth:`from_log2_inv` (or the constructor) for tiny ones.
    """

    log2_inv: float

    def __post_init__(self):
        v = float(self.log2_inv)
        if math.isnan(v) or v < 0.0:
            raise ValueError(f"log2_inv must be a nonnegative real, got {self.log2_inv!r}")
        object.__setattr__(self, "log2_inv", v)

    @classmethod
    def from_prob(cls, p: float) -> LogEpsilon:
        if not 0.0 < p <= 1.0:
            raise ValueError(f"probability must lie in (0, 1], got {p!r}")
        return cls(-math.log2(p))

    @classmethod
    def from_log2_inv(cls, value: float) -> LogEpsilon:
        return cls(value)

    @classmethod
    def from_ln_inv(cls, value: float) -> LogEpsilon:
        return cls(value / LN2)

    @property
    def ln_inv(self) -> float:
        """Natural-log exponent ``ln(1/eps)``."""
        return self.log2_inv * LN2

    @property
    def prob(self) -> float:
        """Plain probability. Refuses values that would underflow."""
        if self.log2_inv > _FLOAT_SAFE_LOG2:
            raise OverflowError(
                f"eps = 2**-{self.log2_inv:g} is not representable as a float"
            )
        return 2.0 ** (-self.log2_inv)

    def __mul__(self, other: LogEpsilon) -> LogEpsilon:
        if not isinstance(other, LogEpsilon):
            return NotImplemented
        return LogEpsilon(self.log2_inv + other.log2_inv)

    def __pow__(self, k: float) -> LogEpsilon:
        if k < 0:
            raise ValueError("negative powers leave (0, 1]")
        return LogEpsilon(self.log2_inv * k)

    def scale(self, factor: float) -> LogEpsilon:
        """``eps * factor`` for ``0 < factor <= 1`` (e.g. a split into parts)."""
        if not 0.0 < factor <= 1.0:
            raise ValueError(f"scale factor must lie in (0, 1], got {factor!r}")
        return LogEpsilon(self.log2_inv - math.log2(factor))

    def __repr__(self):
        return f"LogEpsilon(2**-{self.log2_inv:.6g})"


def _exponent(eps: LogEpsilon) -> float:
    if not isinstance(eps, LogEpsilon):
        raise TypeError(f"expected LogEpsilon, got {type(eps).__name__}")
    if eps.log2_inv == 0.0:
        raise ValueError("eps = 1 makes the concentration bound meaningless")
    return eps.ln_inv


def _count(x: float, name: str) -> float:
    x = float(x)
    if math.isnan(x) or x < 0.0:
        raise ValueError(f"{name} must be nonnegative, got {x!r}")
    return x


def cher_upper_expectation(x: float, eps: LogEpsilon) -> float:
    """Upper bound on the expectation given an observed count ``x``.

    ``x + L + sqrt(L**2 + 2 x L)`` with ``L = ln(1/eps)``.
    """
    x = _count(x, "observed count")
    L = _exponent(eps)
    return x + L + math.sqrt(L * L + 2.0 * x * L)


def cher_lower_expectation(x: float, eps: LogEpsilon) -> float:
    """Lower bound on the expectation given an observed count, clamped at 0."""
    x = _count(x, "observed count")
    L = _exponent(eps)
    if x <= L:
        # x + L/2 - sqrt(...)/2 has the sign of x - L
        return 0.0
    s = math.sqrt(L * L + 8.0 * x * L)
    # (x + L/2)^2 - s^2/4 = x (x - L); avoids cancellation for large x
    return x * (x - L) / (x + 0.5 * L + 0.5 * s)


def cher_upper_observation(e: float, eps: LogEpsilon) -> float:
    """Upper bound on an observed count given its expectation ``e``."""
    e = _count(e, "expected count")
    L = _exponent(eps)
    return e + 0.5 * L + 0.5 * math.sqrt(L * L + 8.0 * e * L)


def cher_lower_observation(e: float, eps: LogEpsilon) -> float:
    """Lower bound on an observed count given its expectation, clamped at 0."""
    e = _count(e, "expected count")
    L = _exponent(eps)
    return max(e - math.sqrt(2.0 * e * L), 0.0)


def ln_definetti_factor(n: int, x: int) -> float:
    """``ln C(n + x - 1, n)``, the de Finetti blow-up for ``n`` rounds.

    Evaluated as ``lnGamma(n+x) - lnGamma(n+1) - lnGamma(x)``. For moderate
    ``x`` the gamma difference ``lnGamma(n+x) - lnGamma(n+1)`` is summed term by
    term as ``sum(ln(n+k))``, which keeps full relative precision where two
    huge ``lgamma`` values would cancel.
    """
    if int(n) != n or int(x) != x:
        raise ValueError("n and x must be integers")
    n, x = int(n), int(x)
    if n < 1:
        raise ValueError(f"round count must be >= 1, got {n}")
    if x < 2:
        raise ValueError(f"dimension square must be >= 2, got {x}")
    if x - 1 <= 10_000:
        head = math.fsum(math.log(n + k) for k in range(1, x))
    else:
        head = math.lgamma(n + x) - math.lgamma(n + 1)
    return head - math.lgamma(x)


def ln_definetti_upper(n: int, x: int) -> float:
    """Closed-form ceiling ``(x-1) ln(e (n+x-1)/(x-1))`` on the factor above."""
    return (x - 1) * (1.0 + math.log((n + x - 1) / (x - 1)))
