"""Feedback drop controllers: a discrete PI law and its quantized gear-box variant.

Rates are bits/second throughout, probabilities plain fractions in [0, 1].
Controller state lives in small immutable records owned by exactly one
output-queue sampler, so distinct (output, flow) loops never share state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum


class FeedbackAction(Enum):
    """Three-level feedback signal (encodable in two bits on the wire)."""

    INCREASE = "increase"
    DECREASE = "decrease"
    HOLD = "hold"


@dataclass(frozen=True)
class PiParams:
    """Gains and scaling for the proportional-integral drop controller."""

    gain_p: float = 0.0
    gain_i: float = 0.5
    interval: float = 1e-3  # seconds between controller updates
    alpha: float = 0.95     # desired-rate margin, 0 < alpha <= 1
    speedup: float = 1.28   # fabric-to-line speed ratio, > 1
    line_rate: float = 1e9  # bits/s

    def __post_init__(self):
        if self.interval <= 0:
            raise ValueError("interval must be positive")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if self.speedup <= 1.0:
            raise ValueError("speedup must exceed 1")
        if self.line_rate <= 0:
            raise ValueError("line_rate must be positive")


@dataclass(frozen=True)
class PiState:
    """Per-(output, flow) PI memory.

    accumulator holds the integral term already scaled by gain_i, so the
    emitted drop rate is gain_p * e[n] + accumulator.
    """

    accumulator: float = 0.0
    last_error: float = 0.0
    last_drop_prob: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.last_drop_prob <= 1.0:
            raise ValueError("last_drop_prob must be a probability")


def pi_update(state: PiState, measured_rate: float, desired_rate: float,
              params: PiParams) -> tuple[float, PiState]:
    """Advance the PI law one interval and return (drop_rate, new_state).

    The emitted value is clamped to [0, measured/(1 - last_drop_prob)]: a
    drop rate can be neither negative nor larger than the estimated arrival
    rate. While the output is pinned at a limit the accumulator is frozen so
    it cannot wind up.
    """
    error = measured_rate - desired_rate
    grown = state.accumulator + params.gain_i * error
    raw = params.gain_p * error + grown
    if state.last_drop_prob < 1.0:
        ceiling = measured_rate / (1.0 - state.last_drop_prob)
    else:
        ceiling = math.inf
    value = min(max(raw, 0.0), ceiling)
    accumulator = grown if value == raw else state.accumulator
    return value, replace(state, accumulator=accumulator, last_error=error)


def drop_prob_from_rate(drop_rate: float, fabric_out_rate: float,
                        prev_prob: float) -> float:
    """Convert a demanded drop rate into a drop probability.

    The dropper already thins arrivals by prev_prob, so the incremental
    probability is (1 - prev_prob) * drop_rate / fabric_out_rate, clamped to
    [0, 1]. A zero measured rate carries no information and leaves the
    probability unchanged.
    """
    if fabric_out_rate <= 0.0:
        return prev_prob
    p = (1.0 - prev_prob) * drop_rate / fabric_out_rate
    return min(max(p, 0.0), 1.0)


# --- gear-box variant -------------------------------------------------------

@dataclass(frozen=True)
class GbParams:
    """Quantized-controller constants.

    d_min/d_max bound the relative-congestion dead band; beta is the
    per-level admit shrink factor; table_size bounds the drop-level pointer.
    """

    d_max: float = 0.17
    d_min: float = 0.02
    beta: float | None = None  # derived from the band when omitted
    table_size: int = 64

    def __post_init__(self):
        if not 0.0 <= self.d_min < self.d_max < 1.0:
            raise ValueError("need 0 <= d_min < d_max < 1")
        if self.table_size < 2:
            raise ValueError("table_size must be at least 2")
        if self.beta is None:
            object.__setattr__(self, "beta", derive_beta(self.d_max, self.d_min))
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must be in (0, 1)")


@dataclass(frozen=True)
class GbState:
    """Drop-level pointer into the quantized drop table."""

    level: int = 0

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be non-negative")


def gb_delta(error: float, prev_error: float, fabric_out_rate: float,
             params: PiParams) -> float:
    """Incremental drop-probability demand of the PI law over one interval.

    Equals ((gain_p + gain_i) * e[n] - gain_p * e[n-1]) / r[n]; the gear-box
    quantizes this to three levels instead of applying it exactly.
    """
    if fabric_out_rate == 0.0:
        raise ValueError("undefined delta: fabric output rate is zero")
    num = (params.gain_p + params.gain_i) * error - params.gain_p * prev_error
    return num / fabric_out_rate

def quantize_delta(delta: float, delta_max: float, delta_min: float,
                   beta: float) -> float:
    """Three-level quantization of the incremental demand.

    Demands above delta_max map to beta (one step up the drop table), ones
    below -delta_min map to beta/(beta - 1) (one step down), anything in the
    dead band maps to zero.
    """
    if delta > delta_max:
        return beta
    if delta < -delta_min:
        return beta / (beta - 1.0)
    return 0.0


def gb_signal_from_congestion(congestion: float, params: GbParams) -> FeedbackAction:
    """Map a relative-congestion measurement onto the two-bit signal."""
    if congestion > params.d_max:
        return FeedbackAction.INCREASE
    if congestion < params.d_min:
        return FeedbackAction.DECREASE
    return FeedbackAction.HOLD


def admit_level_table(beta: float, table_size: int) -> list[float]:
    """Admit probability at each drop level: (1 - beta) ** k."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0, 1)")
    return [(1.0 - beta) ** k for k in range(table_size)]


def drop_level_table(beta: float, table_size: int) -> list[float]:
    """Drop probability at each level, 1 - (1 - beta) ** k.

    Built from the admit table so the drop/admit pair is an exact float
    complement at every level.
    """
    return [1.0 - a for a in admit_level_table(beta, table_size)]


def apply_gb_signal(state: GbState, signal: FeedbackAction,
                    table_size: int) -> GbState:
    """Move the drop-level pointer one step, saturating at both table ends."""
    if signal is FeedbackAction.INCREASE:
        return GbState(min(state.level + 1, table_size - 1))
    if signal is FeedbackAction.DECREASE:
        return GbState(max(state.level - 1, 0))
    return state


# --- derived constants ------------------------------------------------------

def derive_beta(d_max: float, d_min: float) -> float:
    """Step factor that makes up/down moves symmetric in the fluid model.

    One step up from congestion d_max and one step down from d_min both land
    on the same midpoint, which requires beta = 1 - sqrt((1-d_max)/(1-d_min)).
    """
    if not 0.0 <= d_min < d_max < 1.0:
        raise ValueError("degenerate hysteresis band: need 0 <= d_min < d_max < 1")
    return 1.0 - math.sqrt((1.0 - d_max) / (1.0 - d_min))


def d_mid(d_min: float, d_max: float) -> float:
    """Fluid-model congestion reached after one quantized step from either band edge."""
    if not 0.0 <= d_min < d_max < 1.0:
        raise ValueError("degenerate hysteresis band: need 0 <= d_min < d_max < 1")
    return 1.0 - math.sqrt((1.0 - d_min) * (1.0 - d_max))


def derive_thresholds(alpha: float, speedup: float, gain_i: float,
                      delta_max: float, delta_min: float) -> tuple[float, float]:
    """Congestion thresholds equivalent to the quantizer dead band.

    With gain_p = 0 the incremental demand crosses +delta_max exactly when
    relative congestion crosses d_max = 1 - 1/(alpha*s) + delta_max/(alpha*s*gain_i),
    and -delta_min at d_min = 1 - 1/(alpha*s) - delta_min/(alpha*s*gain_i).
    d_min is clamped at zero; congestion below zero means the queue is draining.
    """
    if alpha * speedup <= 1.0:
        raise ValueError("no congestion headroom: alpha * speedup must exceed 1")
    if gain_i <= 0.0:
        raise ValueError("gain_i must be positive")
    base = 1.0 - 1.0 / (alpha * speedup)
    scale = alpha * speedup * gain_i
    dmax = base + delta_max / scale
    dmin = max(base - delta_min / scale, 0.0)
    return dmax, dmin


def deltas_from_thresholds(alpha: float, speedup: float, gain_i: float,
                           dmax: float, dmin: float) -> tuple[float, float]:
    """Inverse of derive_thresholds, used to seed quantizer defaults."""
    if alpha * speedup <= 1.0:
        raise ValueError("no congestion headroom: alpha * speedup must exceed 1")
    if gain_i <= 0.0:
        raise ValueError("gain_i must be positive")
    base = 1.0 - 1.0 / (alpha * speedup)
    scale = alpha * speedup * gain_i
    return (dmax - base) * scale, (base - dmin) * scale
