"""Shared generators and independent reference implementations for the suite."""

import random
from dataclasses import dataclass

from spikesoc import (
    NO_SPIKE,
    BinaryWeights,
    Fixed16Weights,
    InferenceResult,
    LayerConfig,
    NetworkModel,
    SpikeTrain,
    WeightMode,
    run_network,
)

T_MAX_CHOICES = (16, 64, 256)


def random_binary_weights(rng, in_dim, out_dim):
    rows = [[rng.choice((-1, 1)) for _ in range(in_dim)] for _ in range(out_dim)]
    return BinaryWeights.from_rows(rows)


def random_fixed_weights(rng, in_dim, out_dim, magnitude=None):
    if magnitude is None:
        magnitude = rng.choice((8, 128, 1024))
    rows = [
        [rng.randint(-magnitude, magnitude) for _ in range(in_dim)]
        for _ in range(out_dim)
    ]
    return Fixed16Weights.from_rows(rows)


def random_layer(rng, in_dim, out_dim, mode):
    """Layer with a threshold biased toward actually firing."""
    alpha_raw = 256 if rng.random() < 0.5 else rng.randint(64, 1024)
    if mode is WeightMode.BINARY:
        eff_target = rng.randint(-3, max(2, in_dim // 2))
        threshold = round(eff_target * alpha_raw / 256)
        weights = random_binary_weights(rng, in_dim, out_dim)
    else:
        magnitude = rng.choice((8, 128, 1024))
        threshold = rng.randint(-2 * magnitude, max(2, (in_dim * magnitude) // 3))
        weights = random_fixed_weights(rng, in_dim, out_dim, magnitude)
    return LayerConfig(in_dim, out_dim, alpha_raw, threshold), weights


def random_model(rng, *, mode=None, t_max=None, max_layers=3, max_dim=64):
    if mode is None:
        mode = rng.choice((WeightMode.BINARY, WeightMode.FIXED16))
    if t_max is None:
        t_max = rng.choice(T_MAX_CHOICES)
    n_layers = rng.randint(1, max_layers)
    dims = [rng.randint(1, max_dim) for _ in range(n_layers + 1)]
    layers = [
        random_layer(rng, dims[k], dims[k + 1], mode) for k in range(n_layers)
    ]
    return NetworkModel(mode=mode, t_max=t_max, layers=layers)


def random_frame(rng, n, zero_fraction=None):
    """Uniform pixels; half the frames get extra zero pixels so the
    zero-pixel encoding convention is actually exercised."""
    if zero_fraction is None:
        zero_fraction = 0.1 if rng.random() < 0.5 else 0.0
    return bytes(
        0 if rng.random() < zero_fraction else rng.randint(0, 255) for _ in range(n)
    )


@dataclass
class Instance:
    model: NetworkModel
    frame: bytes
    default: InferenceResult  # early stop on, zero pixels silent


def random_instance(rng):
    model = random_model(rng)
    frame = random_frame(rng, model.input_dim)
    return Instance(model=model, frame=frame, default=run_network(model, frame))


def conditioned_instance(rng, max_attempts=500):
    """Instance whose decision is an output spike strictly before the last
    timestep, so events added at the last timestep cannot precede it."""
    for _ in range(max_attempts):
        inst = random_instance(rng)
        t = inst.default.decision_time
        if t is not None and t < inst.model.t_max - 1:
            return inst
    raise RuntimeError("could not draw a conditioned instance")


def reference_sort(train: SpikeTrain):
    """Insertion sort of active events by (time, index); deliberately naive."""
    out = []
    for idx, t in enumerate(train.times):
        if t is NO_SPIKE:
            continue
        k = len(out)
        while k > 0 and (out[k - 1][1], out[k - 1][0]) > (t, idx):
            k -= 1
        out.insert(k, (idx, t))
    return out


def dense_potentials(rows, arrived_indices):
    """Plain nested-loop accumulation of the given events, no thresholds."""
    out = []
    for row in rows:
        out.append(sum(row[i] for i in arrived_indices))
    return out


def assert_same_outcome(a: InferenceResult, b: InferenceResult):
    assert a.predicted == b.predicted
    assert a.decision_time == b.decision_time


def assert_same_state(a: InferenceResult, b: InferenceResult):
    assert_same_outcome(a, b)
    assert len(a.layer_trains) == len(b.layer_trains)
    for ta, tb in zip(a.layer_trains, b.layer_trains):
        assert ta.times == tb.times
        assert ta.t_max == tb.t_max
    for sa, sb in zip(a.layer_states, b.layer_states):
        assert sa.potentials == sb.potentials
        assert sa.fire_times == sb.fire_times
        assert sa.fired == sb.fired


def make_rng(seed):
    return random.Random(seed)
