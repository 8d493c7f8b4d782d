"""133-channel spike encoding of the pong world state.

Channel map (offsets fixed, see SECTION_OFFSETS):
    [0,   30)  ball x, 30 equal-width bins over [-5, 5]
    [30,  60)  ball y, 30 equal-width bins
    [60,  69)  ball vx, 9 equal-probability bins (calibrated boundaries)
    [69,  78)  ball vy, 9 equal-probability bins
    [78, 108)  racket y, 30 equal-width bins
    [108, 133) close zone: 5x5 grid of 0.6 cm squares over the 3x3 cm
               field whose left-border midpoint rides on the racket
               center; row-major, row 0 at the bottom of the field

An *active* channel emits a spike only on the steps where the shared
300 Hz clock ticks, so co-active channels always spike simultaneously --
which is what lets a threshold unit see them as a coincidence. A
per-channel Bernoulli clock is available as an alternative for
robustness experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources as importlib_resources
from typing import Optional, Sequence

import numpy as np

from .pong import ARENA_HALF, WorldState

N_COORD_BINS = 30
N_VEL_BINS = 9
N_ZONE_SIDE = 5
N_CHANNELS = 133

SECTION_OFFSETS = {
    "ball_x": 0,
    "ball_y": 30,
    "ball_vx": 60,
    "ball_vy": 69,
    "racket_y": 78,
    "close_zone": 108,
}
SECTION_SIZES = {
    "ball_x": 30,
    "ball_y": 30,
    "ball_vx": 9,
    "ball_vy": 9,
    "racket_y": 30,
    "close_zone": 25,
}

SPIKE_RATE_HZ = 300
STEP_RATE_HZ = 1000
_TICKS_PER_STEP = SPIKE_RATE_HZ / STEP_RATE_HZ  # 0.3

CLOSE_FIELD_DEPTH = 3.0   # cm, extends from x=-5 to x=-2
CLOSE_FIELD_HALF = 1.5    # cm, vertical half-extent around the racket center
ZONE_SIZE = 0.6           # cm

BINS_FILE_VERSION = 1
DEFAULT_BINS_RESOURCE = "velocity_bins.txt"


def bin_index(value: float, n_bins: int, lo: float, hi: float) -> int:
    """Equal-width bin of value over [lo, hi], clamped to [0, n_bins-1]."""
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {value}")
    if lo >= hi:
        raise ValueError("lo must be < hi")
    k = int(n_bins * (value - lo) / (hi - lo))
    if k < 0:
        return 0
    if k >= n_bins:
        return n_bins - 1
    return k


def velocity_bins(samples: Sequence[float]) -> tuple[float, ...]:
    """Eight interior boundaries splitting samples into 9 equal-mass bins."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.size < 10_000:
        raise ValueError(f"need at least 10000 calibration samples, got {arr.size}")
    bounds = np.quantile(arr, np.arange(1, N_VEL_BINS) / N_VEL_BINS)
    if not np.all(np.diff(bounds) > 0):
        raise ValueError("degenerate calibration samples: boundaries not increasing")
    return tuple(float(b) for b in bounds)


@dataclass(frozen=True)
class EncoderLayout:
    """Fixed channel layout plus the calibrated velocity bin boundaries."""

    vx_bounds: tuple[float, ...]
    vy_bounds: tuple[float, ...]

    def __post_init__(self):
        for name, bounds in (("vx", self.vx_bounds), ("vy", self.vy_bounds)):
            if len(bounds) != N_VEL_BINS - 1:
                raise ValueError(f"{name}_bounds must have {N_VEL_BINS - 1} entries")
            if any(b >= c for b, c in zip(bounds, bounds[1:])):
                raise ValueError(f"{name}_bounds must be strictly increasing")

    @staticmethod
    def default() -> "EncoderLayout":
        """Layout with the checked-in calibration artifact (see scripts/)."""
        ref = importlib_resources.files("causalneuron") / "data" / DEFAULT_BINS_RESOURCE
        with ref.open("r") as fh:
            return load_layout(fh)

    def active_channels(self, state: WorldState) -> list[int]:
        """Channel indices active for this world state, before clock gating.

        One channel per coordinate/velocity section, plus at most one
        close-zone channel when the ball is inside the racket's 3x3 cm
        field. The field may extend virtually past the top/bottom walls;
        zones out there simply never contain the ball.
        """
        out = [
            SECTION_OFFSETS["ball_x"] + bin_index(state.ball_x, N_COORD_BINS, -ARENA_HALF, ARENA_HALF),
            SECTION_OFFSETS["ball_y"] + bin_index(state.ball_y, N_COORD_BINS, -ARENA_HALF, ARENA_HALF),
            SECTION_OFFSETS["ball_vx"] + _bounded_bin(state.ball_vx, self.vx_bounds),
            SECTION_OFFSETS["ball_vy"] + _bounded_bin(state.ball_vy, self.vy_bounds),
            SECTION_OFFSETS["racket_y"] + bin_index(state.racket_y, N_COORD_BINS, -ARENA_HALF, ARENA_HALF),
        ]
        dy = state.ball_y - (state.racket_y - CLOSE_FIELD_HALF)
        if state.ball_x <= -ARENA_HALF + CLOSE_FIELD_DEPTH and 0.0 <= dy <= 2 * CLOSE_FIELD_HALF:
            row = min(int(dy / ZONE_SIZE), N_ZONE_SIDE - 1)
            col = min(int((state.ball_x + ARENA_HALF) / ZONE_SIZE), N_ZONE_SIDE - 1)
            out.append(SECTION_OFFSETS["close_zone"] + row * N_ZONE_SIDE + col)
        return out


def _bounded_bin(value: float, bounds: tuple[float, ...]) -> int:
    k = 0
    for b in bounds:
        if value < b:
            break
        k += 1
    return k


class SpikeClock:
    """Deterministic shared 300 Hz clock (or per-channel Bernoulli gating).

    Shared mode: a spike on every step where floor((t+1) * 0.3) exceeds
    floor(t * 0.3), i.e. 3 spikes per 10 steps in a fixed 3-3-4 gap
    pattern, identical for every channel.
    """

    def __init__(self, mode: str = "shared", rng: Optional[np.random.Generator] = None):
        if mode not in ("shared", "bernoulli"):
            raise ValueError(f"unknown clock mode {mode!r}")
        if mode == "bernoulli" and rng is None:
            raise ValueError("bernoulli clock needs an rng")
        self.mode = mode
        self._rng = rng

    def ticks(self, step: int) -> bool:
        """Shared-mode tick test for one step (pure)."""
        return math.floor((step + 1) * _TICKS_PER_STEP) > math.floor(step * _TICKS_PER_STEP)

    def gate(self, step: int, active: Sequence[int]) -> list[int]:
        """Channels among `active` that actually emit a spike this step."""
        if self.mode == "shared":
            return list(active) if self.ticks(step) else []
        keep = self._rng.random(len(active)) < _TICKS_PER_STEP
        return [c for c, k in zip(active, keep) if k]


def encode(state: WorldState, layout: EncoderLayout, clock: SpikeClock) -> list[int]:
    """Spiking channel indices for one step (sparse frame, no dopamine bit)."""
    return clock.gate(state.step, layout.active_channels(state))


# -- calibration artifact I/O ----------------------------------------------

def dump_layout(layout: EncoderLayout, fh, command: str = "") -> None:
    """Serialize the velocity boundaries as a versioned key-value text file."""
    fh.write(f"# velocity bin boundaries for the pong spike encoder\n")
    if command:
        fh.write(f"# generated by: {command}\n")
    fh.write(f"version = {BINS_FILE_VERSION}\n")
    fh.write("vx_bounds = " + " ".join(repr(b) for b in layout.vx_bounds) + "\n")
    fh.write("vy_bounds = " + " ".join(repr(b) for b in layout.vy_bounds) + "\n")


def load_layout(fh) -> EncoderLayout:
    fields = {}
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    if int(fields.get("version", "-1")) != BINS_FILE_VERSION:
        raise ValueError(f"unsupported bins file version {fields.get('version')}")
    return EncoderLayout(
        vx_bounds=tuple(float(v) for v in fields["vx_bounds"].split()),
        vy_bounds=tuple(float(v) for v in fields["vy_bounds"].split()),
    )
