"""Hidden layers of coupled GLS neurons.

A hidden neuron mixes the activity series of the previous layer with its own
chaotic dynamics::

    H_j(0) = sum_i eta_ij * prev_i(0) + gamma_j * q_j
    H_j(t) = sum_i eta_ij * prev_i(t) + gamma_j * T(H_j(t-1)),   0 < t <= N_max

with non-negative weights satisfying ``sum_i eta_ij + gamma_j == 1``.  Input
neurons are padded with zeros after their own firing time so that every series
has length ``N_max + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gls import GlsMap, MapKind, apply_array
from .ttss import Hyperparams, NonConvergenceError, _orbit, firing_times

WEIGHT_TOLERANCE = 1e-12
_BELOW_ONE = np.nextafter(1.0, 0.0)


class LayerConfigError(ValueError):
    """Invalid hidden-layer specification."""


@dataclass(frozen=True)
class LayerSpec:
    n_inputs: int
    couplings: tuple  # per neuron: tuple of (source index, eta)
    self_weights: tuple  # gamma per neuron
    initial_activity: tuple  # q per neuron
    map_kind: MapKind
    skew: float

    def __post_init__(self):
        couplings = tuple(tuple((int(i), float(w)) for i, w in c) for c in self.couplings)
        gammas = tuple(float(g) for g in self.self_weights)
        qs = tuple(float(q) for q in self.initial_activity)
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "self_weights", gammas)
        object.__setattr__(self, "initial_activity", qs)
        object.__setattr__(self, "map_kind", MapKind.parse(self.map_kind))
        object.__setattr__(self, "skew", float(self.skew))
        object.__setattr__(self, "n_inputs", int(self.n_inputs))
        self.validate()

    @property
    def size(self) -> int:
        return len(self.couplings)

    @property
    def gls_map(self) -> GlsMap:
        return GlsMap(self.map_kind, self.skew)

    def validate(self) -> None:
        if self.n_inputs < 1:
            raise LayerConfigError(f"layer needs at least one input, got {self.n_inputs}")
        if not (len(self.couplings) == len(self.self_weights) == len(self.initial_activity)):
            raise LayerConfigError(
                "couplings, self_weights and initial_activity must have one entry per neuron"
            )
        if self.size == 0:
            raise LayerConfigError("layer has no neurons")
        if not 0.0 < self.skew < 1.0:
            raise LayerConfigError(f"skew must lie in (0, 1), got {self.skew}")
        for j, (links, gamma, q) in enumerate(zip(self.couplings, self.self_weights, self.initial_activity)):
            if gamma < 0 or any(w < 0 for _, w in links):
                raise LayerConfigError(f"neuron {j}: weights must be non-negative")
            for src, _ in links:
                if not 0 <= src < self.n_inputs:
                    raise LayerConfigError(f"neuron {j}: source {src} outside 0..{self.n_inputs - 1}")
            total = math.fsum(w for _, w in links) + gamma
            if abs(total - 1.0) > WEIGHT_TOLERANCE:
                raise LayerConfigError(f"neuron {j}: coupling weights sum to {total!r}, not 1")
            if not 0.0 < q < 1.0:
                raise LayerConfigError(f"neuron {j}: initial activity must lie in (0, 1), got {q}")

    def coupling_matrix(self) -> np.ndarray:
        """Dense (size x n_inputs) matrix of eta weights."""
        eta = np.zeros((self.size, self.n_inputs))
        for j, links in enumerate(self.couplings):
            for src, w in links:
                eta[j, src] += w
        return eta


@dataclass(frozen=True)
class HiddenSeries:
    values: np.ndarray
    n_max: int


def paired_layer_spec(n_inputs: int, eta: float, gamma: float, q: float, gls_map: GlsMap) -> LayerSpec:
    """Neuron j reads inputs 2j and 2j+1 with weight ``eta`` each and itself with ``gamma``.

    With an odd input count the last neuron passes its single input through.
    """
    if n_inputs < 1:
        raise LayerConfigError(f"n_inputs must be positive, got {n_inputs}")
    if abs(2 * eta + gamma - 1.0) > WEIGHT_TOLERANCE:
        raise LayerConfigError(f"2*eta + gamma must equal 1, got {2 * eta + gamma!r}")
    couplings, gammas, qs = [], [], []
    for j in range(math.ceil(n_inputs / 2)):
        if 2 * j + 1 < n_inputs:
            couplings.append(((2 * j, eta), (2 * j + 1, eta)))
            gammas.append(gamma)
        else:
            couplings.append(((2 * j, 1.0),))
            gammas.append(0.0)
        qs.append(q)
    return LayerSpec(n_inputs, tuple(couplings), tuple(gammas), tuple(qs), gls_map.kind, gls_map.skew)


def input_layer_series(params: Hyperparams, instance) -> np.ndarray:
    """Firing trajectories of the input neurons, zero-padded to a common length."""
    x = np.asarray(instance, dtype=float).ravel()
    if x.size and not np.all((x >= 0.0) & (x <= 1.0)):
        raise ValueError("stimuli must be normalised to [0, 1]")
    n_fire = firing_times(params, x)
    if (n_fire < 0).any():
        i = int(np.flatnonzero(n_fire < 0)[0])
        raise NonConvergenceError(params.q, float(x[i]), params.epsilon, params.max_iters, None, i)
    n_max = int(n_fire.max()) if x.size else 0
    orbit = _orbit(params.gls_map, params.q, n_max + 1)
    t = np.arange(n_max + 1)
    return np.where(t[None, :] <= n_fire[:, None], orbit[None, :], 0.0)


def hidden_layer_series(spec: LayerSpec, prev) -> HiddenSeries:
    prev = np.asarray(prev, dtype=float)
    if prev.ndim != 2 or prev.shape[0] != spec.n_inputs:
        raise LayerConfigError(f"layer expects {spec.n_inputs} input rows, got shape {prev.shape}")
    eta = spec.coupling_matrix()
    gamma = np.array(spec.self_weights)
    drive = eta @ prev  # size x (N_max + 1)
    steps = prev.shape[1]
    out = np.empty((spec.size, steps))
    h = np.minimum(drive[:, 0] + gamma * np.array(spec.initial_activity), _BELOW_ONE)
    out[:, 0] = h
    gls_map = spec.gls_map
    for t in range(1, steps):
        # float rounding of a convex combination can touch 1.0
        h = np.minimum(drive[:, t] + gamma * apply_array(gls_map, h), _BELOW_ONE)
        out[:, t] = h
    return HiddenSeries(out, steps - 1)


def hidden_ttss_features(series: HiddenSeries, b: float) -> np.ndarray:
    """Fraction of the whole series (length N_max + 1) spent above ``b``, per neuron."""
    values = np.asarray(series.values)
    return np.count_nonzero(values > b, axis=1) / (series.n_max + 1)


def instance_features(instance, params: Hyperparams, layers) -> np.ndarray:
    series = input_layer_series(params, instance)
    hidden = None
    for spec in layers:
        hidden = hidden_layer_series(spec, series)
        series = hidden.values
    return hidden_ttss_features(hidden, params.b)


def multilayer_features(data, params: Hyperparams, layers) -> np.ndarray:
    """Feature matrix (m x size of last layer) for every row of a normalised matrix."""
    x = np.asarray(data, dtype=float)
    if not layers:
        raise LayerConfigError("at least one hidden layer is required")
    for prev, nxt in zip(layers, layers[1:]):
        if nxt.n_inputs != prev.size:
            raise LayerConfigError(f"layer with {prev.size} neurons feeds a layer expecting {nxt.n_inputs}")
    if x.ndim != 2 or x.shape[1] != layers[0].n_inputs:
        raise LayerConfigError(f"first layer expects {layers[0].n_inputs} columns, got shape {x.shape}")
    out = np.empty((x.shape[0], layers[-1].size))
    for r, row in enumerate(x):
        try:
            out[r] = instance_features(row, params, layers)
        except NonConvergenceError as exc:
            raise NonConvergenceError(exc.q, exc.stimulus, exc.epsilon, exc.max_iters, r, exc.column) from exc
    return out


def layer_to_dict(spec: LayerSpec) -> dict:
    return {
        "n_inputs": spec.n_inputs,
        "couplings": [[[i, w] for i, w in links] for links in spec.couplings],
        "self_weights": list(spec.self_weights),
        "initial_activity": list(spec.initial_activity),
        "map_kind": spec.map_kind.value,
        "skew": spec.skew,
    }


def layer_from_dict(d: dict, defaults: Hyperparams | None = None) -> LayerSpec:
    """Build a layer from its explicit form or the ``{"type": "paired", ...}`` shorthand."""
    d = dict(d)
    kind = d.pop("type", "explicit")
    map_kind = d.pop("map_kind", defaults.map_kind if defaults else None)
    skew = d.pop("skew", defaults.b if defaults else None)
    if map_kind is None or skew is None:
        raise LayerConfigError("layer needs map_kind and skew")
    if kind == "paired":
        allowed = {"n_inputs", "eta", "gamma", "q"}
        if set(d) - allowed or not {"n_inputs", "eta", "gamma", "q"} <= set(d):
            raise LayerConfigError(f"paired layer takes exactly {sorted(allowed)}, got {sorted(d)}")
        return paired_layer_spec(int(d["n_inputs"]), float(d["eta"]), float(d["gamma"]), float(d["q"]),
                                 GlsMap(map_kind, skew))
    if kind != "explicit":
        raise LayerConfigError(f"unknown layer type {kind!r}")
    allowed = {"n_inputs", "couplings", "self_weights", "initial_activity"}
    if set(d) != allowed:
        raise LayerConfigError(f"explicit layer needs exactly {sorted(allowed)}, got {sorted(d)}")
    return LayerSpec(
        d["n_inputs"],
        tuple(tuple((i, w) for i, w in links) for links in d["couplings"]),
        tuple(d["self_weights"]),
        tuple(d["initial_activity"]),
        map_kind,
        skew,
    )
