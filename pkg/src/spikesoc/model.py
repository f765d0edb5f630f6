"""Network model types, bit-exact weight packing, and the flash image format.

Weight storage mirrors the on-chip memories: binary weights pack 16 synapses
per 16-bit word, fixed-point weights are plain 16-bit two's complement.
Within a packed word, bit b of word w holds presynaptic index i = 16*w + b
(bit 0 is the least significant); bit value 1 encodes +1, bit value 0
encodes -1. Padding bits past in_dim in the final word of a row must be
zero, so every packed image is canonical and corruption is detectable.

Flash image layout (little-endian throughout):

    offset  size   field
    0       4      magic "SNN1"
    4       2      format version, = 1
    6       1      weight mode (0 = binary, 1 = fixed16)
    7       1      layer count L (1..255)
    8       2      t_max (1..256)
    10      10*L   layer records: in_dim u16, out_dim u16,
                   alpha u16 (8.8 fixed point), threshold i32
    ...            L weight blobs in layer order, row-major:
                   binary   -> out_dim rows of ceil(in_dim/16) u16 words
                   fixed16  -> out_dim rows of in_dim i16 values
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence, Union

from .errors import (
    CorruptImage,
    CorruptWeightWord,
    InconsistentDims,
    InvalidWeight,
    NotAModelImage,
    TruncatedImage,
    UnsupportedVersion,
)

# Distinguished "no spike in the window" marker used in spike trains and
# fire-time vectors. Kept as a named constant so call sites read as intent.
NO_SPIKE = None

FLASH_MAGIC = b"SNN1"
FLASH_VERSION = 1

INT32_MIN = -(1 << 31)
INT32_MAX = (1 << 31) - 1

_WORDS_PER_CELL = 16  # weights per packed memory word


class WeightMode(Enum):
    """Synaptic weight representation selected for a whole network."""

    BINARY = 0   # weights in {-1, +1}, bit-packed
    FIXED16 = 1  # 16-bit two's-complement weights


def words_per_row(in_dim: int) -> int:
    return (in_dim + _WORDS_PER_CELL - 1) // _WORDS_PER_CELL


def pack_binary_row(weights: Sequence[int]) -> list[int]:
    """Pack a row of {-1, +1} weights into 16-bit words (LSB-first, +1 -> 1).

    Padding bits beyond the row length stay zero.
    """
    if len(weights) < 1:
        raise ValueError("weight row must hold at least one weight")
    words = [0] * words_per_row(len(weights))
    for i, w in enumerate(weights):
        if w == 1:
            words[i >> 4] |= 1 << (i & 15)
        elif w != -1:
            raise InvalidWeight(f"weight at index {i} is {w!r}, expected -1 or +1")
    return words


def unpack_binary_row(words: Sequence[int], in_dim: int) -> list[int]:
    """Inverse of pack_binary_row. Rejects nonzero padding bits."""
    if in_dim < 1:
        raise ValueError("in_dim must be >= 1")
    if len(words) != words_per_row(in_dim):
        raise ValueError(
            f"row of {len(words)} words cannot hold {in_dim} weights "
            f"(expected {words_per_row(in_dim)})"
        )
    for w in words:
        if not 0 <= w <= 0xFFFF:
            raise ValueError(f"word {w:#x} outside 16-bit range")
    tail_bits = in_dim & 15
    if tail_bits and words[-1] >> tail_bits:
        raise CorruptWeightWord(
            f"nonzero padding above bit {tail_bits - 1} in final word {words[-1]:#06x}"
        )
    return [1 if (words[i >> 4] >> (i & 15)) & 1 else -1 for i in range(in_dim)]


@dataclass
class BinaryWeights:
    """Bit-packed {-1, +1} weight matrix; one packed row per postsynaptic neuron.

    Logically immutable: the packed words are the single source of truth.
    Column access keeps a lazily built transpose; concurrent readers may
    build it redundantly but always observe identical values.
    """

    in_dim: int
    words: list[tuple[int, ...]]
    _columns: Optional[list[list[int]]] = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if self.in_dim < 1:
            raise ValueError("in_dim must be >= 1")
        if not self.words:
            raise ValueError("weight matrix needs at least one row")
        per_row = words_per_row(self.in_dim)
        tail_bits = self.in_dim & 15
        for j, row in enumerate(self.words):
            if len(row) != per_row:
                raise ValueError(f"row {j} has {len(row)} words, expected {per_row}")
            for w in row:
                if not 0 <= w <= 0xFFFF:
                    raise ValueError(f"row {j} holds word {w:#x} outside 16-bit range")
            if tail_bits and row[-1] >> tail_bits:
                raise CorruptWeightWord(f"row {j} has nonzero padding bits")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BinaryWeights":
        if not rows:
            raise ValueError("weight matrix needs at least one row")
        in_dim = len(rows[0])
        packed = []
        for j, row in enumerate(rows):
            if len(row) != in_dim:
                raise ValueError(f"row {j} length {len(row)} != {in_dim}")
            packed.append(tuple(pack_binary_row(row)))
        return cls(in_dim=in_dim, words=packed)

    @property
    def out_dim(self) -> int:
        return len(self.words)

    @property
    def weight_bytes(self) -> int:
        return self.out_dim * words_per_row(self.in_dim) * 2

    def row(self, j: int) -> list[int]:
        return unpack_binary_row(self.words[j], self.in_dim)

    def column_signs(self, i: int) -> list[int]:
        """Signs (+1/-1) seen by every postsynaptic neuron for presynaptic index i."""
        if self._columns is None:
            cols = [[0] * self.out_dim for _ in range(self.in_dim)]
            for j, row in enumerate(self.words):
                for i_pre in range(self.in_dim):
                    cols[i_pre][j] = 1 if (row[i_pre >> 4] >> (i_pre & 15)) & 1 else -1
            self._columns = cols
        return self._columns[i]


@dataclass
class Fixed16Weights:
    """Dense 16-bit signed weight matrix, one row per postsynaptic neuron."""

    rows: list[tuple[int, ...]]
    _columns: Optional[list[list[int]]] = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if not self.rows:
            raise ValueError("weight matrix needs at least one row")
        in_dim = len(self.rows[0])
        if in_dim < 1:
            raise ValueError("in_dim must be >= 1")
        for j, row in enumerate(self.rows):
            if len(row) != in_dim:
                raise ValueError(f"row {j} length {len(row)} != {in_dim}")
            for w in row:
                if not -0x8000 <= w <= 0x7FFF:
                    raise ValueError(f"row {j} holds weight {w} outside 16-bit signed range")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Fixed16Weights":
        return cls(rows=[tuple(r) for r in rows])

    @property
    def in_dim(self) -> int:
        return len(self.rows[0])

    @property
    def out_dim(self) -> int:
        return len(self.rows)

    @property
    def weight_bytes(self) -> int:
        return self.out_dim * self.in_dim * 2

    def row(self, j: int) -> list[int]:
        return list(self.rows[j])

    def column(self, i: int) -> list[int]:
        """Weights seen by every postsynaptic neuron for presynaptic index i."""
        if self._columns is None:
            cols = [[0] * self.out_dim for _ in range(self.in_dim)]
            for j, row in enumerate(self.rows):
                for i_pre, w in enumerate(row):
                    cols[i_pre][j] = w
            self._columns = cols
        return self._columns[i]


WeightMatrix = Union[BinaryWeights, Fixed16Weights]


def _div_round_half_away(num: int, den: int) -> int:
    """num/den rounded half away from zero; den > 0."""
    if num >= 0:
        return (2 * num + den) // (2 * den)
    return -((-2 * num + den) // (2 * den))


@dataclass
class LayerConfig:
    """Per-layer parameter memory: dimensions, current scale, firing threshold.

    alpha_raw is an unsigned 8.8 fixed-point scale (256 == 1.0) applied to
    the layer's synaptic current; threshold is a signed 32-bit value in raw
    accumulator units. In binary mode the scale is folded into the
    threshold instead of touching the add/sub datapath; fixed-point models
    are expected to carry the scale inside their weights, so the raw
    threshold is used as-is.
    """

    in_dim: int
    out_dim: int
    alpha_raw: int = 256
    threshold: int = 0

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise ValueError("layer dimensions must be >= 1")
        if not 1 <= self.alpha_raw <= 0xFFFF:
            raise ValueError("alpha_raw must be in [1, 65535]")
        if not INT32_MIN <= self.threshold <= INT32_MAX:
            raise ValueError("threshold outside signed 32-bit range")

    @property
    def alpha(self) -> float:
        return self.alpha_raw / 256.0

    def effective_threshold(self, mode: WeightMode) -> int:
        """Threshold in the units the accumulator actually sees.

        Binary mode folds the current scale: round(threshold / alpha), done
        in integer arithmetic with ties rounded away from zero. Fixed16
        mode compares against the raw threshold.
        """
        if mode is WeightMode.BINARY:
            return _div_round_half_away(self.threshold * 256, self.alpha_raw)
        return self.threshold


@dataclass(frozen=True)
class SpikeTrain:
    """Per-neuron first-spike times inside a discrete window of t_max steps.

    Each slot is a time in [0, t_max-1] or NO_SPIKE; single-spike coding
    means one slot per neuron is the entire train.
    """

    times: tuple
    t_max: int

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(self.times))
        if not 1 <= self.t_max <= 256:
            raise ValueError("t_max must be in [1, 256]")
        for i, t in enumerate(self.times):
            if t is NO_SPIKE:
                continue
            if not isinstance(t, int) or not 0 <= t < self.t_max:
                raise ValueError(f"spike time {t!r} at neuron {i} outside [0, {self.t_max - 1}]")

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator:
        return iter(self.times)

    def __getitem__(self, i):
        return self.times[i]

    @property
    def active_count(self) -> int:
        return sum(1 for t in self.times if t is not NO_SPIKE)


@dataclass
class NetworkModel:
    """Whole-network description: weight mode, time window, chained layers."""

    mode: WeightMode
    t_max: int
    layers: list[tuple[LayerConfig, WeightMatrix]]

    def __post_init__(self):
        if not 1 <= self.t_max <= 256:
            raise ValueError("t_max must be in [1, 256] so spike codes fit one byte")
        if not self.layers:
            raise ValueError("model needs at least one layer")
        expected_kind = BinaryWeights if self.mode is WeightMode.BINARY else Fixed16Weights
        prev_out = None
        for k, (cfg, weights) in enumerate(self.layers):
            if not isinstance(weights, expected_kind):
                raise ValueError(f"layer {k} weights do not match mode {self.mode.name}")
            if weights.in_dim != cfg.in_dim or weights.out_dim != cfg.out_dim:
                raise ValueError(f"layer {k} weight shape disagrees with its config")
            if prev_out is not None and cfg.in_dim != prev_out:
                raise InconsistentDims(
                    f"layer {k} expects {cfg.in_dim} inputs but previous layer emits {prev_out}"
                )
            prev_out = cfg.out_dim

    @property
    def input_dim(self) -> int:
        return self.layers[0][0].in_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1][0].out_dim

    def with_t_max(self, t_max: int) -> "NetworkModel":
        """Same topology and weights under a different time window."""
        return NetworkModel(mode=self.mode, t_max=t_max, layers=list(self.layers))


def serialize_model(model: NetworkModel) -> bytes:
    """Emit the flash image bytes for a model (see module docstring for layout)."""
    if len(model.layers) > 255:
        raise ValueError("flash image caps layer count at 255")
    out = bytearray()
    out += FLASH_MAGIC
    out += struct.pack("<HBBH", FLASH_VERSION, model.mode.value, len(model.layers), model.t_max)
    for cfg, _ in model.layers:
        if cfg.in_dim > 0xFFFF or cfg.out_dim > 0xFFFF:
            raise ValueError("flash image caps layer dimensions at 65535")
        out += struct.pack("<HHHi", cfg.in_dim, cfg.out_dim, cfg.alpha_raw, cfg.threshold)
    for _, weights in model.layers:
        if isinstance(weights, BinaryWeights):
            n = words_per_row(weights.in_dim)
            for row in weights.words:
                out += struct.pack(f"<{n}H", *row)
        else:
            n = weights.in_dim
            for row in weights.rows:
                out += struct.pack(f"<{n}h", *row)
    return bytes(out)


def deserialize_model(data: bytes) -> NetworkModel:
    """Parse a flash image back into a NetworkModel, validating every field."""
    if len(data) < 4 or data[:4] != FLASH_MAGIC:
        raise NotAModelImage("missing SNN1 magic")
    if len(data) < 10:
        raise TruncatedImage("header ends early")
    version, mode_byte, layer_count, t_max = struct.unpack_from("<HBBH", data, 4)
    if version != FLASH_VERSION:
        raise UnsupportedVersion(f"format version {version}, expected {FLASH_VERSION}")
    if mode_byte not in (0, 1):
        raise CorruptImage(f"weight mode byte {mode_byte} is neither 0 nor 1")
    if layer_count < 1:
        raise CorruptImage("layer count must be >= 1")
    if not 1 <= t_max <= 256:
        raise CorruptImage(f"t_max {t_max} outside [1, 256]")
    mode = WeightMode(mode_byte)

    offset = 10
    configs = []
    for k in range(layer_count):
        if offset + 10 > len(data):
            raise TruncatedImage(f"layer record {k} ends early")
        in_dim, out_dim, alpha_raw, threshold = struct.unpack_from("<HHHi", data, offset)
        offset += 10
        if in_dim < 1 or out_dim < 1:
            raise CorruptImage(f"layer {k} declares a zero dimension")
        if alpha_raw < 1:
            raise CorruptImage(f"layer {k} declares alpha 0")
        configs.append(LayerConfig(in_dim, out_dim, alpha_raw, threshold))
    for k in range(1, layer_count):
        if configs[k].in_dim != configs[k - 1].out_dim:
            raise InconsistentDims(
                f"layer {k} expects {configs[k].in_dim} inputs but layer {k - 1} "
                f"emits {configs[k - 1].out_dim}"
            )

    layers = []
    for k, cfg in enumerate(configs):
        if mode is WeightMode.BINARY:
            n = words_per_row(cfg.in_dim)
            blob = cfg.out_dim * n * 2
            if offset + blob > len(data):
                raise TruncatedImage(f"weight blob {k} ends early")
            rows = []
            for j in range(cfg.out_dim):
                rows.append(struct.unpack_from(f"<{n}H", data, offset))
                offset += n * 2
            weights: WeightMatrix = BinaryWeights(in_dim=cfg.in_dim, words=rows)
        else:
            blob = cfg.out_dim * cfg.in_dim * 2
            if offset + blob > len(data):
                raise TruncatedImage(f"weight blob {k} ends early")
            rows = []
            for j in range(cfg.out_dim):
                rows.append(struct.unpack_from(f"<{cfg.in_dim}h", data, offset))
                offset += cfg.in_dim * 2
            weights = Fixed16Weights(rows=rows)
        layers.append((cfg, weights))

    if offset != len(data):
        raise CorruptImage(f"{len(data) - offset} trailing bytes after last weight blob")
    return NetworkModel(mode=mode, t_max=t_max, layers=layers)
