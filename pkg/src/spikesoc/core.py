"""Event-driven datapath: synaptic accumulation, integrate-and-fire updates,
layer execution, and whole-network inference with event skipping.

Conventions fixed here and mirrored by the dense reference simulator:

  * firing compares potential >= the layer's effective threshold;
  * the current scale folds into the threshold in binary mode, so the
    accumulator stays add/sub only;
  * firing is evaluated after a full timestep of accumulation, scanning
    neurons in ascending index order (time-multiplexed update unit), so
    same-time events commute;
  * a fired neuron is frozen: its potential never changes again and it
    never fires twice.

Non-informative events are skipped, never processed: events into a layer
whose neurons have all fired, and events behind the output layer's
decision time when early termination is on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .decoder import decode
from .encoder import InputFrame, encode_ttfs
from .errors import AccumulatorOverflow, DimensionMismatch
from .model import (
    INT32_MAX,
    INT32_MIN,
    BinaryWeights,
    LayerConfig,
    NetworkModel,
    SpikeTrain,
    WeightMatrix,
    WeightMode,
)
from .perf import CycleCostTable, CycleReport, LayerTally, RunTrace, estimate_cycles
from .sorter import EventQueue, sort_spikes


@dataclass
class OpCounters:
    """Datapath operation tallies, the simulation's energy proxy."""

    additions: int = 0
    subtractions: int = 0
    multiplications: int = 0
    events_processed: int = 0
    events_skipped: int = 0


@dataclass
class NeuronState:
    """Membrane accumulators and firing record for one layer."""

    potentials: list
    fired: list
    fire_times: list

    @classmethod
    def zeros(cls, out_dim: int) -> "NeuronState":
        return cls(
            potentials=[0] * out_dim,
            fired=[False] * out_dim,
            fire_times=[None] * out_dim,
        )


def accumulate_event_binary(
    state: NeuronState,
    layer: LayerConfig,
    column_signs,
    counters: OpCounters,
) -> NeuronState:
    """Add one presynaptic event's +-1 column into every unfired neuron.

    Raw units only; the scale lives in the folded threshold. Mutates and
    returns state.
    """
    potentials = state.potentials
    fired = state.fired
    adds = 0
    subs = 0
    for j in range(layer.out_dim):
        if fired[j]:
            continue
        v = potentials[j] + column_signs[j]
        if not INT32_MIN <= v <= INT32_MAX:
            raise AccumulatorOverflow(f"neuron {j} accumulator left 32-bit range")
        potentials[j] = v
        if column_signs[j] > 0:
            adds += 1
        else:
            subs += 1
    counters.additions += adds
    counters.subtractions += subs
    return state


def accumulate_event_fixed16(
    state: NeuronState,
    layer: LayerConfig,
    column,
    counters: OpCounters,
) -> NeuronState:
    """Multiply-accumulate one event's 16-bit weight column into unfired neurons.

    Each touched neuron costs one multiplication (the DSP-backed path).
    Mutates and returns state.
    """
    potentials = state.potentials
    fired = state.fired
    macs = 0
    for j in range(layer.out_dim):
        if fired[j]:
            continue
        v = potentials[j] + column[j]
        if not INT32_MIN <= v <= INT32_MAX:
            raise AccumulatorOverflow(f"neuron {j} accumulator left 32-bit range")
        potentials[j] = v
        macs += 1
    counters.multiplications += macs
    return state


def fire_check(
    state: NeuronState, layer: LayerConfig, now: int, mode: WeightMode
) -> list:
    """Scan neurons in ascending index order; fire any unfired neuron at or
    above the effective threshold. Returns the newly fired indices.

    Call only after all events at timestep `now` have been accumulated;
    the non-leaky neuron cannot cross between events.
    """
    eff = layer.effective_threshold(mode)
    potentials = state.potentials
    fired = state.fired
    newly = []
    for j in range(layer.out_dim):
        if not fired[j] and potentials[j] >= eff:
            fired[j] = True
            state.fire_times[j] = now
            newly.append(j)
    return newly


def run_layer(
    queue: EventQueue,
    layer: LayerConfig,
    weights: WeightMatrix,
    counters: OpCounters,
    *,
    stop_at_first_fire: bool = False,
) -> tuple[SpikeTrain, NeuronState]:
    """Consume a sorted event queue through one layer.

    Events are grouped by timestep; each group is fully accumulated before
    one fire check. Events after every neuron has fired are skipped, and
    with stop_at_first_fire the layer stops after the first timestep that
    fires anything (the processed prefix then equals truncate_after at the
    decision time).
    """
    if isinstance(weights, BinaryWeights):
        mode = WeightMode.BINARY
        fetch_column = weights.column_signs
        accumulate = accumulate_event_binary
    else:
        mode = WeightMode.FIXED16
        fetch_column = weights.column
        accumulate = accumulate_event_fixed16
    if weights.in_dim != layer.in_dim or weights.out_dim != layer.out_dim:
        raise DimensionMismatch("weight shape disagrees with layer config")

    events = queue.events
    n = len(events)
    for ev in events:
        if ev.neuron_index >= layer.in_dim:
            raise DimensionMismatch(
                f"event index {ev.neuron_index} >= layer in_dim {layer.in_dim}"
            )

    state = NeuronState.zeros(layer.out_dim)
    fired_count = 0
    i = 0
    while i < n:
        if fired_count == layer.out_dim:
            break
        t = events[i].time
        g = i
        while g < n and events[g].time == t:
            accumulate(state, layer, fetch_column(events[g].neuron_index), counters)
            g += 1
        counters.events_processed += g - i
        i = g
        newly = fire_check(state, layer, t, mode)
        fired_count += len(newly)
        if stop_at_first_fire and newly:
            break
    counters.events_skipped += n - i

    train = SpikeTrain(tuple(state.fire_times), queue.t_max)
    return train, state


@dataclass
class InferenceResult:
    """Everything one inference produced.

    The dense reference simulator returns the same shape with counters,
    cycles, and trace left as None.
    """

    predicted: int
    decision_time: Optional[int]
    input_train: SpikeTrain
    layer_trains: list
    layer_states: list
    counters: Optional[OpCounters] = None
    cycles: Optional[CycleReport] = None
    trace: Optional[RunTrace] = None


def run_network(
    model: NetworkModel,
    frame: InputFrame,
    *,
    early_stop: bool = True,
    spike_on_zero: bool = False,
    costs: Optional[CycleCostTable] = None,
) -> InferenceResult:
    """Full pipeline: encode, then per layer sort and run, then decode.

    With early_stop the output layer stops once a decision exists; hidden
    layers always run to completion (their later spikes still matter).
    spike_on_zero switches the encoder to the last-timestep convention for
    zero pixels, used by the skip-safety equivalence checks.
    """
    counters = OpCounters()
    train = encode_ttfs(
        frame, model.t_max, spike_on_zero=spike_on_zero, expected_dim=model.input_dim
    )
    input_train = train
    last_layer = len(model.layers) - 1
    layer_trains = []
    layer_states = []
    tallies = []
    for k, (cfg, weights) in enumerate(model.layers):
        queue = sort_spikes(train)
        before = counters.events_processed
        train, state = run_layer(
            queue,
            cfg,
            weights,
            counters,
            stop_at_first_fire=early_stop and k == last_layer,
        )
        tallies.append(
            LayerTally(
                in_dim=cfg.in_dim,
                out_dim=cfg.out_dim,
                events_sorted=len(queue),
                events_processed=counters.events_processed - before,
            )
        )
        layer_trains.append(train)
        layer_states.append(state)

    predicted, decision_time = decode(layer_trains[-1], layer_states[-1].potentials)
    trace = RunTrace(t_max=model.t_max, input_dim=model.input_dim, layers=tuple(tallies))
    cycles = estimate_cycles(trace, costs)
    return InferenceResult(
        predicted=predicted,
        decision_time=decision_time,
        input_train=input_train,
        layer_trains=layer_trains,
        layer_states=layer_states,
        counters=counters,
        cycles=cycles,
        trace=trace,
    )
