import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaosnet.gls import GlsMap, iterate
from chaosnet.multilayer import (
    HiddenSeries,
    LayerConfigError,
    LayerSpec,
    hidden_layer_series,
    hidden_ttss_features,
    input_layer_series,
    layer_from_dict,
    layer_to_dict,
    multilayer_features,
    paired_layer_spec,
)
from chaosnet.ttss import Hyperparams, fire

WORKED = Hyperparams(q=0.23, b=0.56, map_kind="skew_tent", epsilon=0.01)
TENT = GlsMap("skew_tent", 0.56)


def free_layer(q, n_inputs=1):
    return LayerSpec(n_inputs, ((),), (1.0,), (q,), "skew_tent", 0.56)


def pass_through(n):
    return LayerSpec(n, tuple(((i, 1.0),) for i in range(n)), (0.0,) * n, (0.5,) * n, "skew_tent", 0.56)


# -- input layer --------------------------------------------------------------


def test_single_neuron_firing_immediately():
    assert input_layer_series(WORKED, [0.23]).tolist() == [[0.23]]


def test_padding_to_longest_firing_time():
    params = Hyperparams(q=0.23, b=0.56, map_kind="skew_tent", epsilon=1e-9)
    orbit = iterate(TENT, 0.23, 10)
    # with a tiny epsilon, orbit points make stimuli that fire at their own index
    s2, s5 = orbit[2], orbit[5]
    assert fire(params, s2).firing_time == 2 and fire(params, s5).firing_time == 5
    series = input_layer_series(params, [s2, s5])
    assert series.shape == (2, 6)
    assert series[0, 3:].tolist() == [0.0, 0.0, 0.0]
    np.testing.assert_array_equal(series[0, :3], orbit[:3])
    np.testing.assert_array_equal(series[1], orbit[:6])


def test_worked_instance_n_max():
    x = [0.2, 0.5, 0.1, 0.9]
    times = [fire(WORKED, s).firing_time for s in x]
    assert input_layer_series(WORKED, x).shape == (4, max(times) + 1)


# -- hidden layer -------------------------------------------------------------


def test_free_neuron_follows_its_orbit():
    prev = np.zeros((1, 8))
    out = hidden_layer_series(free_layer(0.37), prev)
    np.testing.assert_array_equal(out.values[0], iterate(TENT, 0.37, 7))
    assert out.n_max == 7


def test_pass_through_reproduces_inputs():
    prev = input_layer_series(WORKED, [0.2, 0.5, 0.1, 0.9])
    out = hidden_layer_series(pass_through(4), prev)
    assert out.values.tobytes() == prev.tobytes()


def test_exoplanet_pairing():
    spec = paired_layer_spec(6, 0.4995, 0.001, 0.56, TENT)
    assert spec.size == 3
    assert spec.couplings[1] == ((2, 0.4995), (3, 0.4995))
    assert spec.self_weights == (0.001,) * 3


def test_paired_sizes():
    spec = paired_layer_spec(45, 0.4995, 0.001, 0.56, TENT)
    assert spec.size == 23
    assert spec.couplings[-1] == ((44, 1.0),) and spec.self_weights[-1] == 0.0
    spec4 = paired_layer_spec(4, 0.4995, 0.001, 0.56, TENT)
    assert spec4.size == 2 and all(len(c) == 2 for c in spec4.couplings)


def test_paired_rejects_bad_weights():
    with pytest.raises(LayerConfigError):
        paired_layer_spec(4, 0.5, 0.1, 0.56, TENT)


def test_two_layer_pipeline_dimension():
    first = paired_layer_spec(45, 0.4995, 0.001, 0.56, TENT)
    second = pass_through(23)
    data = np.random.default_rng(0).uniform(size=(3, 45))
    feats = multilayer_features(data, WORKED, (first, second))
    assert feats.shape == (3, 23)
    assert np.all((feats >= 0) & (feats <= 1))


def test_layer_chain_mismatch():
    with pytest.raises(LayerConfigError):
        multilayer_features(np.full((1, 4), 0.3), WORKED, (pass_through(4), pass_through(3)))


@pytest.mark.parametrize(
    "couplings, gammas, qs",
    [
        ((((0, 0.5),),), (0.4,), (0.3,)),  # sum 0.9
        ((((0, -0.1),),), (1.1,), (0.3,)),  # negative weight
        ((((3, 1.0),),), (0.0,), (0.3,)),  # bad source
        ((((0, 1.0),),), (0.0,), (1.0,)),  # q outside (0, 1)
        ((((0, 1.0),),), (0.0, 0.0), (0.3,)),  # ragged
    ],
)
def test_invalid_specs(couplings, gammas, qs):
    with pytest.raises(LayerConfigError):
        LayerSpec(2, couplings, gammas, qs, "skew_tent", 0.56)


def test_tolerance_accepts_decimal_literals():
    LayerSpec(2, (((0, 0.1), (1, 0.2)),), (0.7,), (0.5,), "skew_tent", 0.56)


# -- features -----------------------------------------------------------------


def test_hidden_feature_examples():
    assert hidden_ttss_features(HiddenSeries(np.full((1, 5), 0.1), 4), 0.5).tolist() == [0.0]
    assert hidden_ttss_features(HiddenSeries(np.full((1, 5), 0.9), 4), 0.5).tolist() == [1.0]
    for n in (0, 3, 40):
        assert hidden_ttss_features(HiddenSeries(np.full((2, n + 1), 0.7), n), 0.5).tolist() == [1.0, 1.0]


def test_hidden_feature_denominator():
    series = HiddenSeries(np.array([[0.9, 0.1, 0.9, 0.1]]), 3)
    assert hidden_ttss_features(series, 0.5).tolist() == [0.5]


# -- serialisation ------------------------------------------------------------


def test_layer_dict_round_trip():
    spec = paired_layer_spec(7, 0.4995, 0.001, 0.56, TENT)
    assert layer_from_dict(layer_to_dict(spec)) == spec


def test_paired_shorthand():
    d = {"type": "paired", "n_inputs": 45, "eta": 0.4995, "gamma": 0.001, "q": 0.56}
    assert layer_from_dict(d, WORKED).size == 23
    with pytest.raises(LayerConfigError):
        layer_from_dict({**d, "extra": 1}, WORKED)


# -- properties ---------------------------------------------------------------


def random_layer(rng, n_inputs, size):
    couplings, gammas = [], []
    for _ in range(size):
        k = int(rng.integers(0, n_inputs + 1))
        src = rng.choice(n_inputs, size=k, replace=False)
        w = rng.dirichlet(np.ones(k + 1))
        couplings.append(tuple(zip(src.tolist(), w[:k].tolist())))
        gammas.append(float(1.0 - w[:k].sum()))
    qs = rng.uniform(0.01, 0.99, size)
    kind = "skew_tent" if rng.integers(2) else "skew_binary"
    return LayerSpec(n_inputs, tuple(couplings), tuple(gammas), tuple(qs), kind, rng.uniform(0.05, 0.95))


def test_convexity_closure():
    rng = np.random.default_rng(21)
    for _ in range(10_000):
        n = int(rng.integers(1, 5))
        spec = random_layer(rng, n, int(rng.integers(1, 4)))
        prev = rng.uniform(0.0, 1.0, size=(n, int(rng.integers(1, 12))))
        prev[rng.uniform(size=prev.shape) < 0.05] = np.nextafter(1.0, 0.0)
        out = hidden_layer_series(spec, prev).values
        assert np.all((out >= 0.0) & (out < 1.0))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_multilayer_deterministic(seed):
    rng = np.random.default_rng(seed)
    spec = random_layer(rng, 3, 2)
    data = rng.uniform(size=(2, 3))
    params = Hyperparams(0.37, 0.61, "skew_tent", 0.02, 100_000)
    a = multilayer_features(data, params, (spec,))
    b = multilayer_features(data, params, (spec,))
    assert a.tobytes() == b.tobytes()
