"""Replay of episode records through a detector, with windowed reporting.

Replay is event-driven: steps without spikes or dopamine are skipped via
Detector.advance_to, which is exactly equivalent to ticking empty frames
but turns a 2,000,000-step episode into a few hundred thousand ticks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .neuron import Detector
from .records import EpisodeRecord

WindowHook = Callable[[int, Detector], None]


def replay(
    detector: Detector,
    record: EpisodeRecord,
    *,
    window_steps: Optional[int] = None,
    on_window: Optional[WindowHook] = None,
) -> list[int]:
    """Replay a record from the detector's current step to the end.

    Returns the steps at which the detector fired. If ``window_steps``
    is given, ``on_window(window_index, detector)`` is called with the
    detector advanced exactly to each window boundary (boundary step not
    yet processed), including the final boundary at n_steps.
    """
    if record.n_channels != detector.n:
        raise ValueError(
            f"record has {record.n_channels} channels, detector has {detector.n}"
        )
    start = detector.step
    if start > record.n_steps:
        raise ValueError("detector is already past the end of the record")

    spike_steps = record.spike_steps.tolist()
    indptr = record.indptr.tolist()
    chans = record.channels.tolist()
    rewards = record.reward_steps.tolist()
    i = int(np.searchsorted(record.spike_steps, start))
    j = int(np.searchsorted(record.reward_steps, start))
    n_spk = len(spike_steps)
    n_rew = len(rewards)

    if window_steps is not None and window_steps < 1:
        raise ValueError("window_steps must be >= 1")
    boundary = None
    if window_steps is not None:
        boundary = (start // window_steps + 1) * window_steps

    fires: list[int] = []
    tick = detector.tick_sparse
    while i < n_spk or j < n_rew:
        t_spk = spike_steps[i] if i < n_spk else record.n_steps
        t_rew = rewards[j] if j < n_rew else record.n_steps
        t = t_spk if t_spk <= t_rew else t_rew
        while boundary is not None and boundary <= t and boundary <= record.n_steps:
            detector.advance_to(boundary)
            if on_window is not None:
                on_window(boundary // window_steps - 1, detector)
            boundary += window_steps
        detector.advance_to(t)
        if t_spk == t:
            active = chans[indptr[i]:indptr[i + 1]]
            i += 1
        else:
            active = ()
        dopamine = t_rew == t
        if dopamine:
            j += 1
        if tick(active, dopamine):
            fires.append(t)
    while boundary is not None and boundary <= record.n_steps:
        detector.advance_to(boundary)
        if on_window is not None:
            on_window(boundary // window_steps - 1, detector)
        boundary += window_steps
    detector.advance_to(record.n_steps)
    return fires


@dataclass
class WindowRow:
    """Per-window training statistics (window length fixed by the caller)."""

    window: int
    fire_rate_hz: float
    stability: float
    abs_weight_change: float


def train_on_record(
    record: EpisodeRecord,
    detector: Detector,
    *,
    window_steps: int = 10_000,
    on_window: Optional[WindowHook] = None,
) -> tuple[list[int], list[WindowRow]]:
    """Replay with plasticity on, collecting fires and per-window stats.

    ``on_window(boundary_step, detector)``, if given, runs at each window
    boundary after the statistics row is recorded (e.g. to freeze
    plasticity partway through a run).
    """
    rows: list[WindowRow] = []
    state = {"fires": 0, "dw": 0.0}

    def hook(idx: int, det: Detector) -> None:
        rows.append(
            WindowRow(
                window=idx,
                fire_rate_hz=(det.fire_count - state["fires"])
                / (window_steps * record.step_ms / 1000.0),
                stability=det.stability,
                abs_weight_change=det.total_abs_dw - state["dw"],
            )
        )
        state["fires"] = det.fire_count
        state["dw"] = det.total_abs_dw
        if on_window is not None:
            on_window((idx + 1) * window_steps, det)

    fires = replay(detector, record, window_steps=window_steps, on_window=hook)
    return fires, rows
