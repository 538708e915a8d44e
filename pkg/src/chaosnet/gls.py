"""Generalized Luroth Series (GLS) maps: the dynamics of a single chaotic neuron.

Two piecewise-linear maps on [0, 1) are provided, both with branch point ``b``:

    skew-binary:  x/b on [0, b),  (x - b)/(1 - b) on [b, 1)
    skew-tent:    x/b on [0, b),  (1 - x)/(1 - b) on [b, 1)

An output that lands exactly on 1.0 (skew-tent at x == b, or float rounding)
is wrapped to 0.0 so that iteration stays inside [0, 1).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Raised when a map is evaluated outside [0, 1)."""


class MapKind(str, enum.Enum):
    SKEW_TENT = "skew_tent"
    SKEW_BINARY = "skew_binary"

    @classmethod
    def parse(cls, value: "str | MapKind") -> "MapKind":
        if isinstance(value, MapKind):
            return value
        key = str(value).strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {
            "skewtent": cls.SKEW_TENT,
            "tent": cls.SKEW_TENT,
            "skewbinary": cls.SKEW_BINARY,
            "binary": cls.SKEW_BINARY,
        }
        try:
            return cls(key)
        except ValueError:
            pass
        if key.replace("_", "") in aliases:
            return aliases[key.replace("_", "")]
        raise ValueError(f"unknown map kind {value!r}; expected 'skew_tent' or 'skew_binary'")


@dataclass(frozen=True)
class GlsMap:
    kind: MapKind
    skew: float

    def __post_init__(self):
        object.__setattr__(self, "kind", MapKind.parse(self.kind))
        skew = float(self.skew)
        if not 0.0 < skew < 1.0:
            raise ValueError(f"skew must lie in (0, 1), got {self.skew!r}")
        object.__setattr__(self, "skew", skew)

    def __call__(self, x: float) -> float:
        return apply(self, x)


def _check_unit(x: float) -> None:
    if not 0.0 <= x < 1.0:
        raise DomainError(f"GLS maps are defined on [0, 1); got x={x!r}")


def _step(kind: MapKind, b: float, x: float) -> float:
    # Unchecked single step; callers guarantee 0 <= x < 1.
    if x < b:
        y = x / b
    elif kind is MapKind.SKEW_BINARY:
        y = (x - b) / (1.0 - b)
    else:
        y = (1.0 - x) / (1.0 - b)
    return 0.0 if y >= 1.0 else y


def apply(gls_map: GlsMap, x: float) -> float:
    """Apply the map once. Raises :class:`DomainError` for x outside [0, 1)."""
    x = float(x)
    _check_unit(x)
    return _step(gls_map.kind, gls_map.skew, x)


def apply_array(gls_map: GlsMap, x: np.ndarray) -> np.ndarray:
    """Vectorised :func:`apply`; every element must already lie in [0, 1)."""
    x = np.asarray(x, dtype=float)
    if x.size and not (np.all(x >= 0.0) and np.all(x < 1.0)):
        raise DomainError("GLS maps are defined on [0, 1); array has values outside")
    b = gls_map.skew
    if gls_map.kind is MapKind.SKEW_BINARY:
        right = (x - b) / (1.0 - b)
    else:
        right = (1.0 - x) / (1.0 - b)
    y = np.where(x < b, x / b, right)
    y[y >= 1.0] = 0.0
    return y


def iterate(gls_map: GlsMap, x0: float, n: int) -> np.ndarray:
    """Return the orbit ``[x0, T(x0), ..., T^n(x0)]`` as an array of n + 1 floats."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    x = float(x0)
    _check_unit(x)
    kind, b = gls_map.kind, gls_map.skew
    out = np.empty(n + 1)
    out[0] = x
    for i in range(1, n + 1):
        x = _step(kind, b, x)
        out[i] = x
    return out


def symbolize(trajectory, b: float) -> str:
    """Itinerary of a trajectory as a string over {'L', 'R'}.

    Values below ``b`` map to 'L', values at or above ``b`` to 'R', matching the
    half-open branches of the map.
    """
    return "".join("L" if v < b else "R" for v in np.asarray(trajectory, dtype=float).ravel())


def lyapunov_exponent(gls_map: GlsMap, base: str = "nats") -> float:
    """Lyapunov exponent ``-b ln b - (1-b) ln(1-b)``; in bits it equals the
    Shannon entropy of the itinerary."""
    b = gls_map.skew
    if base == "bits":
        return -b * math.log2(b) - (1.0 - b) * math.log2(1.0 - b)
    if base == "nats":
        return -b * math.log(b) - (1.0 - b) * math.log(1.0 - b)
    raise ValueError(f"base must be 'nats' or 'bits', got {base!r}")
