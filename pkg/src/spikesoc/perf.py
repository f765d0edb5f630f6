"""Cycle-cost and memory-footprint model.

The pipeline is modeled as sequential per-layer stages. With the default
cost table (one cycle per pixel, per sorted event, per neuron scanned, per
decoded neuron, and a t_max bucket sweep per sort):

    encode = in_dim
    sort   = sum over layers of (t_max + events entering the sorter)
    neuron = sum over layers of (events processed * out_dim)
    decode = out_dim of the last layer
    total  = encode + sort + neuron + decode, exactly

Events skipped by early termination or by a fully-fired layer cost
nothing in the neuron stage, which is the whole point of skipping them.
Costs are configurable; the defaults are unit weights for internal
consistency checks, not calibrated silicon timings. Energy is reported as
operation counts elsewhere (OpCounters), never as watts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

from .model import NetworkModel, WeightMode, words_per_row


@dataclass(frozen=True)
class CycleCostTable:
    """Stage costs in cycles. sort_base None means "use the run's t_max"."""

    encode_per_pixel: int = 1
    sort_base: Optional[int] = None
    sort_per_event: int = 1
    scc_per_event_per_neuron: int = 1
    decode_per_neuron: int = 1

    def __post_init__(self):
        for name in (
            "encode_per_pixel",
            "sort_per_event",
            "scc_per_event_per_neuron",
            "decode_per_neuron",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.sort_base is not None and self.sort_base < 0:
            raise ValueError("sort_base must be >= 0")


@dataclass(frozen=True)
class LayerTally:
    """Event counts observed while one layer ran."""

    in_dim: int
    out_dim: int
    events_sorted: int
    events_processed: int


@dataclass(frozen=True)
class RunTrace:
    """Per-stage tallies collected from one inference."""

    t_max: int
    input_dim: int
    layers: tuple

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim


@dataclass(frozen=True)
class LayerCycles:
    sort_cycles: int
    neuron_cycles: int


@dataclass(frozen=True)
class CycleReport:
    """Latency breakdown; total is the exact sum of the four stages."""

    encode_cycles: int
    sort_cycles: int
    neuron_cycles: int
    decode_cycles: int
    total_cycles: int
    per_layer: tuple = ()

    def __post_init__(self):
        stages = (
            self.encode_cycles + self.sort_cycles + self.neuron_cycles + self.decode_cycles
        )
        if self.total_cycles != stages:
            raise ValueError(f"total {self.total_cycles} != stage sum {stages}")


def estimate_cycles(trace: RunTrace, costs: Optional[CycleCostTable] = None) -> CycleReport:
    """Apply the cost table to a run trace (formulas in the module docstring)."""
    c = costs if costs is not None else CycleCostTable()
    sort_base = c.sort_base if c.sort_base is not None else trace.t_max
    encode = trace.input_dim * c.encode_per_pixel
    per_layer = []
    sort_total = 0
    neuron_total = 0
    for tally in trace.layers:
        sort_cycles = sort_base + tally.events_sorted * c.sort_per_event
        neuron_cycles = tally.events_processed * tally.out_dim * c.scc_per_event_per_neuron
        per_layer.append(LayerCycles(sort_cycles=sort_cycles, neuron_cycles=neuron_cycles))
        sort_total += sort_cycles
        neuron_total += neuron_cycles
    decode = trace.output_dim * c.decode_per_neuron
    return CycleReport(
        encode_cycles=encode,
        sort_cycles=sort_total,
        neuron_cycles=neuron_total,
        decode_cycles=decode,
        total_cycles=encode + sort_total + neuron_total + decode,
        per_layer=tuple(per_layer),
    )


def binary_weight_bytes(in_dim: int, out_dim: int) -> int:
    return out_dim * words_per_row(in_dim) * 2


def fixed16_weight_bytes(in_dim: int, out_dim: int) -> int:
    return out_dim * in_dim * 2


@dataclass(frozen=True)
class LayerMemory:
    weight_bytes: int
    spike_bytes: int
    total_bytes: int


@dataclass(frozen=True)
class MemoryReport:
    """Byte-level footprint of the on-chip memories.

    Spike memories hold one byte per neuron per layer boundary; the first
    layer also owns the input spike buffer, every layer owns its output
    codes.
    """

    layers: tuple
    weight_bytes: int
    spike_bytes: int
    total_bytes: int


def memory_footprint(model: NetworkModel) -> MemoryReport:
    """Exact byte counts for the model's weight and spike memories."""
    layers = []
    weight_total = 0
    spike_total = 0
    for k, (cfg, weights) in enumerate(model.layers):
        if model.mode is WeightMode.BINARY:
            wb = binary_weight_bytes(cfg.in_dim, cfg.out_dim)
        else:
            wb = fixed16_weight_bytes(cfg.in_dim, cfg.out_dim)
        sb = cfg.out_dim + (cfg.in_dim if k == 0 else 0)
        layers.append(LayerMemory(weight_bytes=wb, spike_bytes=sb, total_bytes=wb + sb))
        weight_total += wb
        spike_total += sb
    return MemoryReport(
        layers=tuple(layers),
        weight_bytes=weight_total,
        spike_bytes=spike_total,
        total_bytes=weight_total + spike_total,
    )


def cycles_to_ms(cycles: int, clock_mhz: float = 163.0) -> float:
    """Wall time for a cycle count at a given clock, for report readability only."""
    if clock_mhz <= 0:
        raise ValueError("clock_mhz must be positive")
    return cycles / (clock_mhz * 1e3)


def write_breakdown_csv(report: CycleReport, path) -> None:
    """Emit the stage breakdown as CSV rows (stage, cycles, fraction)."""
    total = report.total_cycles
    rows = [
        ("encode", report.encode_cycles),
        ("sort", report.sort_cycles),
        ("neuron", report.neuron_cycles),
        ("decode", report.decode_cycles),
    ]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["stage", "cycles", "fraction"])
        for stage, cycles in rows:
            fraction = cycles / total if total else 0.0
            writer.writerow([stage, cycles, f"{fraction:.6f}"])
