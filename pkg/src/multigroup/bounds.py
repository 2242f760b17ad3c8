"""Error bounds and sample-size requirements for ERM over C(G, H).

All logarithms are natural. Sauer sums are exact integers and only the
final logarithm is taken in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .combinatorics import sauer_bound
from .errors import ValidationError

DEFAULT_BIG_C = 4.0


@dataclass(frozen=True)
class BoundParams:
    n: int = 1
    delta: float = 0.05
    epsilon: float = 0.1
    gamma: float = 1.0
    d_g: int = 1
    d_G: int = 1
    d_GH: int = 1
    d_H: int | None = None
    cardG: int = 1
    bigC: float = DEFAULT_BIG_C

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("n must be at least 1")
        _check_open_unit(self.delta, "delta")
        _check_open_unit(self.epsilon, "epsilon")
        if not 0.0 < self.gamma <= 1.0:
            raise ValidationError("gamma must lie in (0, 1]")
        for name in ("d_g", "d_G", "d_GH"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative")
        if self.d_H is not None and self.d_H < 0:
            raise ValidationError("d_H must be non-negative")
        if self.cardG < 1:
            raise ValidationError("cardG must be at least 1")
        if not self.bigC > 0:
            raise ValidationError("bigC must be positive")

    @property
    def vc_H(self) -> int:
        """VC dimension of H; falls back to d_GH when unset."""
        return self.d_GH if self.d_H is None else self.d_H


def _check_open_unit(x, name):
    if not 0.0 < x < 1.0:
        raise ValidationError(f"{name} must lie in (0, 1), got {x!r}")


def _check_n(n):
    if n < 1:
        raise ValidationError("n must be at least 1")


def _ceil(x: float) -> int:
    # snap float noise like 2.0000000000000004 before rounding up
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def alpha_n(n: int, shatter2n: int, delta: float) -> float:
    """(4/n) ln(4 S(F, 2n) / delta)."""
    _check_n(n)
    if shatter2n < 1:
        raise ValidationError("shattering coefficient must be at least 1")
    _check_open_unit(delta, "delta")
    return 4.0 / n * (math.log(4 * shatter2n) - math.log(delta))


def foreach_bound(n: int, d_g: int, delta: float) -> float:
    """Joint mistake mass bound for a single fixed group."""
    _check_n(n)
    _check_open_unit(delta, "delta")
    if d_g < 0:
        raise ValidationError("d_g must be non-negative")
    return 4.0 * (math.log(sauer_bound(2 * n, d_g)) + math.log(4.0 / delta)) / n


def forall_bound(n: int, d_G: int, d_GH: int, delta: float) -> float:
    """Joint mistake mass bound holding for all groups at once."""
    _check_n(n)
    _check_open_unit(delta, "delta")
    if d_G < 0 or d_GH < 0:
        raise ValidationError("dimensions must be non-negative")
    return 4.0 * (math.log(sauer_bound(2 * n, d_G)) + math.log(sauer_bound(2 * n, d_GH))
                  + math.log(4.0 / delta)) / n


def _gamma_eps(params: BoundParams) -> float:
    ge = params.gamma * params.epsilon
    if ge >= 1.0:
        raise ValidationError("gamma * epsilon must be below 1")
    return ge


def sample_size_vc(params: BoundParams) -> int:
    ge = _gamma_eps(params)
    num = (params.d_GH + params.d_G) * math.log(1.0 / ge) + math.log(1.0 / params.delta)
    return _ceil(params.bigC * num / ge)


def sample_size_cardinality(params: BoundParams) -> int:
    """Sample size when paying log|G| instead of the VC dimension of G."""
    ge = _gamma_eps(params)
    num = params.vc_H * math.log(1.0 / ge) + math.log(params.cardG) + math.log(1.0 / params.delta)
    return _ceil(params.bigC * num / ge)
