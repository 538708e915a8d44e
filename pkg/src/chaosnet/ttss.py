"""Topological-transitivity firing and the TT-SS feature.

A neuron starts at activity ``q`` and iterates its GLS map until the activity
enters the open neighbourhood ``(s - eps, s + eps)`` of the stimulus ``s``.  The
number of iterations is the firing time ``N``.  The TT-SS feature is the fraction
of the firing time spent above the threshold ``b``::

    feature = #{t in 0..N-1 : A(t) > b} / N        (0 when N == 0)

The terminal activity ``A(N)`` (the one already inside the neighbourhood) is not
counted.  This is the only counting rule among the obvious candidates that
reproduces the short-trajectory entries of the published worked example.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gls import GlsMap, MapKind, iterate

DEFAULT_MAX_ITERS = 10_000


class NonConvergenceError(RuntimeError):
    """The neuron did not reach the stimulus neighbourhood within ``max_iters``."""

    def __init__(self, q, stimulus, epsilon, max_iters, row=None, column=None):
        self.q = q
        self.stimulus = stimulus
        self.epsilon = epsilon
        self.max_iters = max_iters
        self.row = row
        self.column = column
        where = "" if row is None else f" at (row {row}, column {column})"
        super().__init__(
            f"neuron with q={q!r} did not enter the {epsilon!r}-neighbourhood of "
            f"stimulus {stimulus!r} within {max_iters} iterations{where}; "
            "q may lie on a periodic orbit, try a different initial activity"
        )


@dataclass(frozen=True)
class Hyperparams:
    q: float
    b: float
    map_kind: MapKind = MapKind.SKEW_TENT
    epsilon: float = 0.01
    max_iters: int = DEFAULT_MAX_ITERS

    def __post_init__(self):
        object.__setattr__(self, "map_kind", MapKind.parse(self.map_kind))
        for name in ("q", "b", "epsilon"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not 0.0 <= self.q < 1.0:
            raise ValueError(f"q must lie in [0, 1), got {self.q}")
        if not 0.0 < self.b < 1.0:
            raise ValueError(f"b must lie in (0, 1), got {self.b}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters}")
        object.__setattr__(self, "max_iters", int(self.max_iters))

    @property
    def gls_map(self) -> GlsMap:
        return GlsMap(self.map_kind, self.b)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "b": self.b,
            "map_kind": self.map_kind.value,
            "epsilon": self.epsilon,
            "max_iters": self.max_iters,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperparams":
        return cls(
            q=d["q"],
            b=d["b"],
            map_kind=d.get("map_kind", MapKind.SKEW_TENT),
            epsilon=d.get("epsilon", 0.01),
            max_iters=d.get("max_iters", DEFAULT_MAX_ITERS),
        )


# Hyperparameter rows used for the published experiments.
PRESETS = {
    "mnist": Hyperparams(0.336, 0.331, MapKind.SKEW_BINARY, 0.01),
    "kddcup99": Hyperparams(0.6, 0.335, MapKind.SKEW_TENT, 0.01),
    "iris": Hyperparams(0.6, 0.9867556, MapKind.SKEW_BINARY, 0.01),
    "exoplanet": Hyperparams(0.26242424242424245, 0.149, MapKind.SKEW_TENT, 0.01),
    "exoplanet_no_surface_temp": Hyperparams(0.26242424242424245, 0.149, MapKind.SKEW_TENT, 0.01),
    "exoplanet_restricted": Hyperparams(0.9500000000000006, 0.476, MapKind.SKEW_TENT, 0.001),
}


@dataclass(frozen=True)
class FiringTrajectory:
    activity: np.ndarray
    firing_time: int


def _check_stimulus(stimulus: float) -> float:
    s = float(stimulus)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"stimulus must be normalised to [0, 1], got {stimulus!r}")
    return s


def fire(params: Hyperparams, stimulus: float) -> FiringTrajectory:
    """Iterate from ``q`` until the activity is within ``epsilon`` of the stimulus."""
    s = _check_stimulus(stimulus)
    gls_map = params.gls_map
    x = params.q
    activity = [x]
    eps = params.epsilon
    while not abs(x - s) < eps:
        if len(activity) > params.max_iters:
            raise NonConvergenceError(params.q, s, eps, params.max_iters)
        x = gls_map(x)
        activity.append(x)
    return FiringTrajectory(np.array(activity), len(activity) - 1)


def ttss_feature(traj: FiringTrajectory, b: float) -> float:
    n = traj.firing_time
    if n == 0:
        return 0.0
    return int(np.count_nonzero(traj.activity[:n] > b)) / n


@lru_cache(maxsize=32)
def _orbit(gls_map: GlsMap, q: float, length: int) -> np.ndarray:
    orbit = iterate(gls_map, q, length - 1)
    orbit.setflags(write=False)
    return orbit


_BLOCK = 512


def firing_times(params: Hyperparams, stimuli: np.ndarray) -> np.ndarray:
    """Firing time for every stimulus, sharing one orbit of ``q``.

    All neurons start from the same ``q`` under the same map, so their
    trajectories are prefixes of a single orbit; ``N`` is the first orbit index
    inside each stimulus neighbourhood.  Entries that never fire are -1.
    """
    s = np.asarray(stimuli, dtype=float).ravel()
    out = np.full(s.shape, -1, dtype=np.int64)
    if s.size == 0:
        return out
    cap = params.max_iters + 1
    length = min(cap, 1024)
    orbit = _orbit(params.gls_map, params.q, length)
    pending = np.arange(s.size)
    start = 0
    while pending.size and start < cap:
        if start >= length:
            length = min(cap, 2 * length)
            orbit = _orbit(params.gls_map, params.q, length)
        stop = min(start + _BLOCK, length)
        block = orbit[start:stop]
        hit = np.abs(block[None, :] - s[pending, None]) < params.epsilon
        found = hit.any(axis=1)
        out[pending[found]] = start + hit[found].argmax(axis=1)
        pending = pending[~found]
        start = stop
    return out


def extract_features(data, params: Hyperparams) -> np.ndarray:
    """TT-SS feature of every entry of a normalised m x n matrix."""
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {x.shape}")
    if x.size == 0:
        return np.zeros(x.shape)
    bad = ~((x >= 0.0) & (x <= 1.0))
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise ValueError(f"data must be normalised to [0, 1]; entry ({r}, {c}) is {x[r, c]!r}")
    n_fire = firing_times(params, x).reshape(x.shape)
    if (n_fire < 0).any():
        r, c = (int(v) for v in np.argwhere(n_fire < 0)[0])
        raise NonConvergenceError(params.q, float(x[r, c]), params.epsilon, params.max_iters, r, c)
    orbit = _orbit(params.gls_map, params.q, int(n_fire.max()) + 1)
    # above[k] = number of orbit points A(0..k-1) strictly above b
    above = np.concatenate(([0], np.cumsum(orbit > params.b)))
    h = above[n_fire]
    return np.where(n_fire > 0, h / np.maximum(n_fire, 1), 0.0)
