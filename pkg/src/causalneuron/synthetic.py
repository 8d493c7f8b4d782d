"""Synthetic records with a known causal structure.

A chosen subset of channels co-activates at rare random times and a
reward follows each activation after exactly a fixed lag; every other
channel carries independent Bernoulli noise. Because the generator
knows the causes, these records act as a ground-truth oracle for the
causal-detection claim: a trained detector must end up with its largest
synaptic resources on the cause channels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .records import EpisodeRecord


@dataclass(frozen=True)
class SyntheticConfig:
    n_channels: int = 20
    cause_channels: tuple[int, ...] = (2, 7, 13)
    lag: int = 100                  # cause -> reward delay, steps (= T_P)
    n_steps: int = 300_000
    noise_rate: float = 0.001       # per-channel per-step spike probability
    min_gap: int = 300              # min steps between cause activations
    max_gap: int = 1200             # max steps between cause activations
    seed: int = 0

    def __post_init__(self):
        if not self.cause_channels:
            raise ValueError("need at least one cause channel")
        if any(c < 0 or c >= self.n_channels for c in self.cause_channels):
            raise ValueError("cause channel out of range")
        if len(set(self.cause_channels)) != len(self.cause_channels):
            raise ValueError("duplicate cause channels")
        if self.lag < 1:
            raise ValueError("lag must be >= 1")
        if not 0.0 <= self.noise_rate < 1.0:
            raise ValueError("noise_rate must be in [0, 1)")
        if not 0 < self.min_gap <= self.max_gap:
            raise ValueError("need 0 < min_gap <= max_gap")
        if self.min_gap <= self.lag:
            raise ValueError("cause activations must be rarer than the lag")


def generate(cfg: SyntheticConfig) -> EpisodeRecord:
    """Build a synthetic episode record; rewards sit exactly lag after causes."""
    rng = np.random.default_rng(cfg.seed)

    cause_steps = []
    t = int(rng.integers(cfg.min_gap, cfg.max_gap + 1))
    while t + cfg.lag < cfg.n_steps:
        cause_steps.append(t)
        t += int(rng.integers(cfg.min_gap, cfg.max_gap + 1))
    reward_steps = [t + cfg.lag for t in cause_steps]

    causes = set(cfg.cause_channels)
    frames: dict[int, list[int]] = {}
    for t in cause_steps:
        frames[t] = sorted(causes)
    for ch in range(cfg.n_channels):
        if ch in causes:
            continue
        spikes = np.nonzero(rng.random(cfg.n_steps) < cfg.noise_rate)[0]
        for t in spikes.tolist():
            frames.setdefault(t, []).append(ch)

    return EpisodeRecord.build(
        step_ms=1,
        n_channels=cfg.n_channels,
        seed=cfg.seed,
        n_steps=cfg.n_steps,
        frames=((t, sorted(frames[t])) for t in sorted(frames)),
        reward_steps=reward_steps,
        punishment_steps=(),
    )
