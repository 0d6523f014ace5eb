"""Projector-based localization model: gray-coded light patterns and pose
recovery from two photodiodes.

The projector plays a sequence of striped frames, one per bit and axis, so a
photodiode that logs bright/dark over the sequence reads off the gray code of
the grid cell it sits in.  Two diodes mounted at known body-frame offsets
give position and orientation in one shot.  Bit order is MSB-first: frame 0
of an axis carries the most significant gray bit.

Frame synchronization and radiometry are out of scope; decoding operates on
an already-aligned bit vector and sensing is ideal point sampling at cell
resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .geom import rot, wrap_angle


class GrayCodeError(ValueError):
    """Raised for malformed configs, bitstreams, or degenerate readings."""


class DegenerateBaselineError(GrayCodeError):
    """Both photodiodes decoded to the same cell: no orientation information."""


def gray_encode(n: int) -> int:
    return n ^ (n >> 1)


def gray_decode(g: int) -> int:
    n = 0
    while g:
        n ^= g
        g >>= 1
    return n


@dataclass(frozen=True)
class GrayCodeConfig:
    """Projection grid and sensor mounting.

    The grid spans 2**bits_per_axis cells per axis starting at `origin`;
    sensor offsets are body-frame mounting points in mm.
    """

    bits_per_axis: int = 10
    cell_size: float = 4.0
    origin: tuple[float, float] = (0.0, 0.0)
    sensor_offsets: tuple[tuple[float, float], tuple[float, float]] = (
        (-10.0, 0.0), (10.0, 0.0))

    def __post_init__(self) -> None:
        if self.bits_per_axis < 1:
            raise GrayCodeError("bits_per_axis must be at least 1")
        if self.cell_size <= 0.0:
            raise GrayCodeError("cell_size must be positive")
        a, b = self.sensor_offsets
        if a == b:
            raise GrayCodeError("sensor offsets must be distinct")

    @property
    def cells_per_axis(self) -> int:
        return 1 << self.bits_per_axis

    @property
    def baseline(self) -> float:
        (ax, ay), (bx, by) = self.sensor_offsets
        return math.hypot(bx - ax, by - ay)

    @property
    def quantization_bound(self) -> float:
        """Worst-case orientation error from cell-center quantization."""
        return math.atan(self.cell_size * math.sqrt(2.0) / self.baseline)


@dataclass(frozen=True)
class PatternFrame:
    """One projected frame: stripes along one axis for one gray bit."""

    axis: str  # "x" or "y"
    bit_index: int
    bits_per_axis: int = field(repr=False)

    def __post_init__(self) -> None:
        if self.axis not in ("x", "y"):
            raise GrayCodeError("axis must be 'x' or 'y'")
        if not 0 <= self.bit_index < self.bits_per_axis:
            raise GrayCodeError("bit_index out of range")

    def bright(self, cell: int) -> bool:
        """Brightness of this frame over any cell in the striped axis."""
        shift = self.bits_per_axis - 1 - self.bit_index  # MSB-first
        return (gray_encode(cell) >> shift) & 1 == 1


def encode_patterns(cfg: GrayCodeConfig) -> tuple[PatternFrame, ...]:
    """The full projection sequence: x frames MSB to LSB, then y frames."""
    return tuple(PatternFrame(axis, i, cfg.bits_per_axis)
                 for axis in ("x", "y") for i in range(cfg.bits_per_axis))


def decode_bits(bits_x: Sequence[int], bits_y: Sequence[int],
                cfg: GrayCodeConfig) -> tuple[int, int]:
    """Cell indices from per-axis brightness logs (MSB-first, one per frame)."""
    cells = []
    for axis, stream in (("x", bits_x), ("y", bits_y)):
        if len(stream) != cfg.bits_per_axis:
            raise GrayCodeError(
                f"{axis} bitstream has {len(stream)} bits, "
                f"expected {cfg.bits_per_axis}")
        g = 0
        for bit in stream:
            g = (g << 1) | (1 if bit else 0)
        cells.append(gray_decode(g))
    return cells[0], cells[1]


def cell_center(cfg: GrayCodeConfig, ix: int, iy: int) -> tuple[float, float]:
    return (cfg.origin[0] + (ix + 0.5) * cfg.cell_size,
            cfg.origin[1] + (iy + 0.5) * cfg.cell_size)


def simulate_reading(cfg: GrayCodeConfig, pose: tuple[float, float, float]
                     ) -> tuple[tuple[int, int], tuple[int, int]]:
    """Cells each photodiode would decode for a robot at `pose`.

    Ideal sensing: the true sensor point is quantized to its containing cell.
    """
    x, y, heading = pose
    cells = []
    for ox, oy in cfg.sensor_offsets:
        wx, wy = rot(heading, ox, oy)
        sx, sy = x + wx, y + wy
        ix = math.floor((sx - cfg.origin[0]) / cfg.cell_size)
        iy = math.floor((sy - cfg.origin[1]) / cfg.cell_size)
        if not (0 <= ix < cfg.cells_per_axis and 0 <= iy < cfg.cells_per_axis):
            raise GrayCodeError(f"sensor at ({sx:.1f}, {sy:.1f}) mm is outside "
                                "the projection area")
        cells.append((ix, iy))
    return cells[0], cells[1]


def pose_from_photodiodes(cell_a: tuple[int, int], cell_b: tuple[int, int],
                          cfg: GrayCodeConfig
                          ) -> tuple[tuple[float, float], float, float]:
    """Robot position, orientation, and the orientation error bound.

    Sensor world positions are taken as their cell centers; orientation is
    the bearing of the sensor pair minus the body-frame mount bearing, and
    position is the sensed midpoint pulled back by the rotated body-frame
    midpoint.
    """
    if cell_a == cell_b:
        raise DegenerateBaselineError(
            f"both sensors decoded cell {cell_a}: baseline collapsed")
    wa = cell_center(cfg, *cell_a)
    wb = cell_center(cfg, *cell_b)
    (oax, oay), (obx, oby) = cfg.sensor_offsets
    mount = math.atan2(oby - oay, obx - oax)
    orientation = wrap_angle(math.atan2(wb[1] - wa[1], wb[0] - wa[0]) - mount)
    mid_body = (0.5 * (oax + obx), 0.5 * (oay + oby))
    off = rot(orientation, mid_body[0], mid_body[1])
    position = (0.5 * (wa[0] + wb[0]) - off[0], 0.5 * (wa[1] + wb[1]) - off[1])
    return position, orientation, cfg.quantization_bound


def frame_to_pgm(frame: PatternFrame) -> bytes:
    """Binary PGM (P5) image of one frame, one pixel per grid cell."""
    n = 1 << frame.bits_per_axis
    row = bytes((255 if frame.bright(c) else 0) for c in range(n))
    if frame.axis == "x":
        body = row * n  # stripes vary along x, constant down the image
    else:
        body = b"".join(bytes([row[c]]) * n for c in range(n))
    return b"P5\n%d %d\n255\n" % (n, n) + body
