"""Closed-form analysis of the single-flow drop-control loop.

The loop that maps the measured fabric output rate into a drop rate through
the PI law has two poles given by a quadratic in the gains. For a rate step
the response is a linear ramp while the modelled fabric queue is backlogged,
then a geometric approach to the gap between arrival and desired rate. A
brute-force time-stepping recurrence doubles as an oracle for the algebra
and works outside the stability region, where the closed form refuses to.

Everything here is the linear model: drop rates may go negative or exceed
the arrival rate, saturation never re-engages once the backlog clears. The
event-level simulator owns the nonlinear behaviour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

_MAX_RAMP_INTERVALS = 10_000_000


@dataclass(frozen=True)
class StepScenario:
    """Constant arrival rate applied to an idle loop at n = 0.

    Rates share one unit (bits/s in practice, anything consistent works);
    interval is the controller period in seconds.
    """

    arrival_rate: float
    desired_rate: float
    fabric_capacity: float
    gain_p: float = 0.0
    gain_i: float = 0.5
    interval: float = 1.0

    def __post_init__(self):
        if self.arrival_rate <= 0:
            raise ValueError("arrival_rate must be positive")
        if self.desired_rate >= self.fabric_capacity:
            raise ValueError("desired_rate must stay below fabric_capacity")
        if self.interval <= 0:
            raise ValueError("interval must be positive")


@dataclass(frozen=True)
class StepResponse:
    """Closed-form step response: ramp data plus pole/residue description."""

    n0: int                  # first interval with the fabric queue empty
    s_n0: float              # integral term carried out of the ramp
    pole1: complex | float
    pole2: complex | float
    coeff1: float
    coeff2: float
    rate_gap: float          # arrival minus desired rate
    drop_sequence: list[float] = field(repr=False)
    queue_sequence: list[float] = field(repr=False)


def poles(gain_p: float, gain_i: float) -> tuple[float, float]:
    """Roots of z**2 + (gain_p + gain_i - 1) z - gain_p, ordered |z1| >= |z2|.

    Negative gain_p is rejected; the discriminant is then never negative, so
    both poles are real.
    """
    if gain_p < 0:
        raise ValueError("gain_p must be non-negative")
    b = gain_p + gain_i - 1.0
    root = math.sqrt(b * b + 4.0 * gain_p)
    z1 = (-b + root) / 2.0
    z2 = (-b - root) / 2.0
    if abs(z2) > abs(z1):
        z1, z2 = z2, z1
    return z1, z2


def is_stable(gain_p: float, gain_i: float) -> bool:
    """Both poles strictly inside the unit circle: 0 < gain_i < 2 (1 - gain_p)."""
    return 0.0 < gain_i < 2.0 * (1.0 - gain_p)


def queue_at(scenario: StepScenario, n: int):
    """Modelled fabric backlog at the end of interval n during the ramp.

    q_n = T [ (n+1)(lam - sc) - n K (sc - r_opt) - n(n+1)/2 K_I (sc - r_opt) ].
    Pure polynomial arithmetic, so exact-number inputs stay exact.
    """
    gap = scenario.fabric_capacity - scenario.desired_rate
    lam_excess = scenario.arrival_rate - scenario.fabric_capacity
    return scenario.interval * (
        (n + 1) * lam_excess
        - n * scenario.gain_p * gap
        - (n * (n + 1) * scenario.gain_i * gap) / 2
    )


def queue_trajectory(scenario: StepScenario, count: int) -> list:
    """queue_at evaluated for n = 0 .. count-1."""
    return [queue_at(scenario, n) for n in range(count)]


def initial_period(scenario: StepScenario) -> tuple[int, float, float]:
    """Length of the saturated ramp: (n0, s_n0, max_queue).

    n0 is the smallest n with q_{n-1} <= 0, found by integer search over the
    backlog quadratic; s_n0 = gain_i * n0 * (sc - r_opt) is the accumulator
    value carried into the closed loop; max_queue is the ramp's backlog peak.
    Zero everything when the arrival rate never saturates the fabric.
    """
    if scenario.arrival_rate <= scenario.fabric_capacity:
        return 0, 0.0, 0.0
    max_queue = 0.0
    for n in range(_MAX_RAMP_INTERVALS):
        q = queue_at(scenario, n)
        if q <= 0.0:
            gap = scenario.fabric_capacity - scenario.desired_rate
            return n + 1, scenario.gain_i * (n + 1) * gap, max_queue
        if q > max_queue:
            max_queue = q
    raise ValueError("fabric queue never drains; check the gains")


def step_response_recurrence(scenario: StepScenario, horizon: int) -> list[float]:
    """Brute-force iteration of the loop, valid for unstable gains too.

    During the ramp the measured rate is pinned at the fabric capacity and
    the backlog shrinks by the previously demanded drop rate. When the
    backlog clears, the loop delay restarts empty (the closed form solves the
    post-ramp system with a fresh one-sided transform) while the accumulator
    carries over. Saturation end is decided from the same per-interval
    backlog quadratic the closed form uses, so both routes agree on n0.
    """
    lam = scenario.arrival_rate
    sc = scenario.fabric_capacity
    ropt = scenario.desired_rate
    out: list[float] = []
    acc = 0.0
    rho_prev = 0.0  # the loop delay element, reset when leaving saturation
    saturated = lam > sc
    for n in range(horizon):
        rate = sc if saturated else lam - rho_prev
        err = rate - ropt
        acc += scenario.gain_i * err
        rho = scenario.gain_p * err + acc
        out.append(rho)
        if saturated:
            if queue_at(scenario, n) <= 0.0:
                saturated = False  # next interval runs the closed loop
        else:
            rho_prev = rho
    return out


def step_response_closed_form(scenario: StepScenario, horizon: int) -> StepResponse:
    """Analytic step response over n = 0 .. horizon-1.

    Requires stable gains; outside the stability region only the recurrence
    is meaningful. The ramp part is gain-linear; from n0 on the response is
    D (1 - A1 z1**m + A2 z2**m) with m = n - n0 and D the arrival/desired gap.
    """
    if not is_stable(scenario.gain_p, scenario.gain_i):
        raise ValueError(
            "closed form diverges: gains outside stability region 0 < K_I < 2(1 - K)")
    n0, s_n0, _peak = initial_period(scenario)
    z1, z2 = poles(scenario.gain_p, scenario.gain_i)
    gap = scenario.fabric_capacity - scenario.desired_rate
    d = scenario.arrival_rate - scenario.desired_rate

    seq: list[float] = []
    ramp = min(n0, horizon)
    for n in range(ramp):
        seq.append((scenario.gain_p + (n + 1) * scenario.gain_i) * gap)

    a1 = a2 = 0.0
    if d != 0.0 and z1 != z2:
        ratio = s_n0 / d
        a1 = (z1 * z1 - ratio * z1) / (z1 - z2)
        a2 = (z2 * z2 - ratio * z2) / (z1 - z2)
    for n in range(ramp, horizon):
        m = n - n0
        if d == 0.0:
            seq.append(0.0)
        elif z1 == z2:
            # repeated pole only happens at the origin (deadbeat gains)
            total = scenario.gain_p + scenario.gain_i
            seq.append(total * d + s_n0 if m == 0 else d)
        else:
            seq.append(d * (1.0 - a1 * z1 ** m + a2 * z2 ** m))

    return StepResponse(
        n0=n0,
        s_n0=s_n0,
        pole1=z1,
        pole2=z2,
        coeff1=a1,
        coeff2=a2,
        rate_gap=d,
        drop_sequence=seq,
        queue_sequence=queue_trajectory(scenario, n0),
    )


def multiflow_initial_rate(own_rate: float, other_rate: float,
                           fabric_capacity: float) -> float:
    """Fabric output rate a flow sees when sharing one output during saturation.

    FIFO mixing hands each flow capacity in proportion to its arrival rate;
    an uncontended output just passes the arrivals through.
    """
    total = own_rate + other_rate
    if total <= 0:
        raise ValueError("at least one flow must offer traffic")
    if total > fabric_capacity:
        return fabric_capacity * own_rate / total
    return own_rate
