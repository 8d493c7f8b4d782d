"""Synaptic resource model: the resource-to-weight squash and stability-gated rates.

Plasticity is additive on an unbounded per-synapse "resource" W; the
actual weight w is a saturating rational function of W confined to
[w_min, w_max). A per-neuron "stability" scalar s attenuates both
plasticity rates by min(2^-s, 1), so a well-trained (stable) neuron
stops changing its weights.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PlasticityConfig:
    """Constants of the detector neuron.

    The anti-Hebbian and dopamine maximum increments are deliberately a
    single shared value (``d_bar``): their balance is what keeps a
    correctly firing neuron's weights fixed. ``d_H_bar`` and ``d_D_bar``
    are exposed as read-only aliases.
    """

    d_bar: float          # max resource change per plasticity event
    w_min: float          # weight lower bound, negative
    w_max: float          # weight upper bound (open), positive
    d_s: float            # stability change speed
    T_P: int = 100        # causal window length in steps; also ISI_max
    H: float = 1.0        # firing threshold (strict)

    def __post_init__(self) -> None:
        if not (self.w_min < 0.0 < self.w_max):
            raise ValueError(f"require w_min < 0 < w_max, got [{self.w_min}, {self.w_max}]")
        if self.d_bar <= 0.0:
            raise ValueError("d_bar must be positive")
        if self.d_s <= 0.0:
            raise ValueError("d_s must be positive")
        if self.T_P < 1:
            raise ValueError("T_P must be >= 1")

    @property
    def d_H_bar(self) -> float:
        return self.d_bar

    @property
    def d_D_bar(self) -> float:
        return self.d_bar

    @property
    def isi_max(self) -> int:
        """Tightness bound for postsynaptic spike sequences (equals T_P)."""
        return self.T_P


def weight_of(resource: float, cfg: PlasticityConfig) -> float:
    """Map a synaptic resource W to the effective weight w.

    Total function: any real W yields a weight in [w_min, w_max).
    Monotone non-decreasing; resources <= 0 all collapse to w_min.
    """
    w = resource if resource > 0.0 else 0.0
    span = cfg.w_max - cfg.w_min
    return cfg.w_min + span * w / (span + w)


def resource_for_weight(target_w: float, cfg: PlasticityConfig) -> float:
    """Inverse of :func:`weight_of` on [w_min, w_max).

    Needed because learning starts from *weight* zero, which is a
    positive resource (w_min is negative). Raises ``ValueError`` outside
    the attainable range; w_min itself maps back to resource 0.
    """
    if not (cfg.w_min <= target_w < cfg.w_max):
        raise ValueError(
            f"target weight {target_w} outside attainable range [{cfg.w_min}, {cfg.w_max})"
        )
    if target_w <= cfg.w_min:
        return 0.0
    span = cfg.w_max - cfg.w_min
    return span * (target_w - cfg.w_min) / (cfg.w_max - target_w)


def effective_rates(s: float, cfg: PlasticityConfig) -> tuple[float, float]:
    """Stability-attenuated plasticity magnitudes (d_H, d_D).

    Both rates equal d_bar * min(2^-s, 1): full strength at s <= 0,
    halving per unit of positive stability. Always equal to each other.
    """
    factor = 2.0 ** (-s) if s > 0.0 else 1.0
    d = cfg.d_bar * factor
    return d, d
