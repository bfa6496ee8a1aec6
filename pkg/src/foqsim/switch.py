"""Packet-level model of a feedback output-queued switch.

One N-port shared-memory switch. Ingress droppers thin arriving traffic per
(output, flow); survivors enter a shared fabric pool with two priority FIFOs
per output. Each output line drains its fabric queues at the speedup rate
into per-flow output queues, which a strict-priority plus weighted-fair
scheduler empties onto the line. A per-(output, flow) sampler measures
relative congestion every interval and drives the configured feedback
controller; the resulting drop level is applied at every ingress dropper.

Byte counters are integers, timestamps integer nanoseconds, and every
stochastic decision draws from its own named generator, so equal seeds give
bit-identical runs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum

from .control import (
    FeedbackAction,
    GbParams,
    GbState,
    PiParams,
    PiState,
    apply_gb_signal,
    drop_level_table,
    drop_prob_from_rate,
    gb_signal_from_congestion,
    pi_update,
)
from .events import NS, RANK_CONTROL, RANK_TICK, EventLoop, ns, stream, tx_ns
from .timeseries import TimeSeries


class ServiceClass(Enum):
    PREMIUM = "premium"
    ASSURED = "assured"
    BEST_EFFORT = "besteffort"


@dataclass(slots=True)
class Packet:
    flow_id: int
    ingress_port: int
    egress_port: int
    size: int  # bytes
    svc_class: ServiceClass
    created_at: int  # ns, set by the source
    seq: int = 0
    source: int = 0
    arrived_at: int = -1  # ns, stamped at the ingress dropper


@dataclass(frozen=True)
class RedParams:
    """Random early detection on an output queue."""

    max_p: float = 0.5
    min_th: int = 1000   # bytes
    max_th: int = 3000   # bytes
    weight: float = 0.1  # EWMA weight at the sampling cadence
    sample_interval: float = 1e-3  # seconds


@dataclass(frozen=True)
class FlowSpec:
    svc_class: ServiceClass = ServiceClass.ASSURED
    weight: float = 1.0
    police_rate: float | None = None  # bits/s token bucket, premium only
    police_burst: int = 6000          # bytes


@dataclass(frozen=True)
class FeedbackConfig:
    mode: str = "off"  # off | pi | gearbox
    interval: float = 1e-3  # seconds
    delay: float = 0.0      # signal propagation back to the ingress
    alpha: float = 0.95
    gain_p: float = 0.0
    gain_i: float = 0.5
    d_max: float = 0.17
    d_min: float = 0.02
    table_size: int = 64
    measure: str = "relcong"  # relcong | dropprob


@dataclass(frozen=True)
class SwitchConfig:
    num_ports: int
    line_rate: float           # bits/s per port
    speedup: float             # fabric-to-line ratio, > 1
    fabric_memory: int         # bytes, shared pool
    out_queue_size: int        # bytes per output queue
    flows: dict[int, FlowSpec] = field(default_factory=dict)
    red: RedParams | None = None  # None means plain drop-tail
    feedback: FeedbackConfig = field(default_factory=FeedbackConfig)
    num_classes: int | None = None
    report_interval: float | None = None  # defaults to the feedback interval

    def validate(self) -> list[str]:
        """Every violation, not just the first."""
        bad = []
        if self.num_ports < 1:
            bad.append("switch.num_ports: must be at least 1")
        if self.line_rate <= 0:
            bad.append("switch.line_rate: must be positive")
        if self.speedup <= 1.0:
            bad.append("switch.speedup: must exceed 1")
        if self.fabric_memory <= 0:
            bad.append("switch.fabric_memory: must be positive")
        if self.out_queue_size <= 0:
            bad.append("switch.out_queue_size: must be positive")
        if not self.flows:
            bad.append("flow: at least one flow must be defined")
        for fid, spec in self.flows.items():
            if spec.weight <= 0:
                bad.append(f"flow.{fid}.weight: must be positive")
            if spec.police_rate is not None and spec.police_rate <= 0:
                bad.append(f"flow.{fid}.police_rate: must be positive")
            if self.num_classes is not None and fid >= self.num_classes:
                bad.append(f"flow.{fid}: id exceeds switch.num_classes")
        fb = self.feedback
        if fb.mode not in ("off", "pi", "gearbox"):
            bad.append("switch.feedback.mode: must be off, pi or gearbox")
        if fb.interval <= 0:
            bad.append("switch.feedback.interval: must be positive")
        if fb.delay < 0:
            bad.append("switch.feedback.delay: must be non-negative")
        if not 0.0 < fb.alpha <= 1.0:
            bad.append("switch.feedback.alpha: must be in (0, 1]")
        if fb.mode == "pi":
            if fb.gain_p < 0:
                bad.append("switch.feedback.gain_p: must be non-negative")
            if fb.gain_i <= 0:
                bad.append("switch.feedback.gain_i: must be positive")
        if fb.mode == "gearbox" and not 0.0 <= fb.d_min < fb.d_max < 1.0:
            bad.append("switch.feedback.d_min/d_max: need 0 <= d_min < d_max < 1")
        if fb.table_size < 2:
            bad.append("switch.feedback.table_size: must be at least 2")
        if fb.measure not in ("relcong", "dropprob"):
            bad.append("switch.feedback.measure: must be relcong or dropprob")
        if self.red is not None:
            r = self.red
            if not 0.0 < r.max_p <= 1.0:
                bad.append("switch.red.max_p: must be in (0, 1]")
            if not 0 <= r.min_th < r.max_th:
                bad.append("switch.red.min_th/max_th: need 0 <= min_th < max_th")
            if not 0.0 < r.weight <= 1.0:
                bad.append("switch.red.weight: must be in (0, 1]")
            if r.sample_interval <= 0:
                bad.append("switch.red.sample_interval: must be positive")
        return bad


def ingress_admit(packet: Packet, drop_prob: float, rng) -> bool:
    """Bernoulli admission at an ingress dropper; premium bypasses it."""
    if packet.svc_class is ServiceClass.PREMIUM:
        return True
    if drop_prob <= 0.0:
        return True
    if drop_prob >= 1.0:
        return False
    return rng.random() >= drop_prob


def red_drop_probability(avg: float, params: RedParams) -> float:
    """Linear ramp from min_th to max_th, certain drop above max_th."""
    if avg < params.min_th:
        return 0.0
    if avg >= params.max_th:
        return 1.0
    return params.max_p * (avg - params.min_th) / (params.max_th - params.min_th)


class _TokenBucket:
    __slots__ = ("rate", "burst", "tokens", "last")

    def __init__(self, rate_bps: float, burst_bytes: int, now: int):
        self.rate = rate_bps
        self.burst = float(burst_bytes)
        self.tokens = float(burst_bytes)
        self.last = now

    def admit(self, size: int, now: int) -> bool:
        self.tokens = min(self.burst,
                          self.tokens + (now - self.last) * self.rate / (8 * NS))
        self.last = now
        if self.tokens >= size:
            self.tokens -= size
            return True
        return False


class _OutQueue:
    __slots__ = ("egress", "flow_id", "svc_class", "weight", "packets",
                 "backlog", "last_tag", "in_bytes", "out_bytes",
                 "dropped_bytes", "red_avg")

    def __init__(self, egress, flow_id, svc_class, weight):
        self.egress = egress
        self.flow_id = flow_id
        self.svc_class = svc_class
        self.weight = weight
        self.packets = deque()  # (packet, finish_tag)
        self.backlog = 0        # bytes
        self.last_tag = 0.0
        self.in_bytes = 0       # sampler counters, reset every interval
        self.out_bytes = 0
        self.dropped_bytes = 0
        self.red_avg = 0.0


class _Ledger:
    __slots__ = ("injected", "ingress_dropped", "fabric_dropped",
                 "egress_dropped", "delivered")

    def __init__(self):
        self.injected = 0
        self.ingress_dropped = 0
        self.fabric_dropped = 0
        self.egress_dropped = 0
        self.delivered = 0


_REP_FIELDS = ("delivered", "ingress", "fabric", "egress")


class Switch:
    """The simulated switch plus its event loop and measurement series."""

    def __init__(self, config: SwitchConfig, seed: int = 0,
                 loop: EventLoop | None = None):
        bad = config.validate()
        if bad:
            raise ValueError("invalid switch config: " + "; ".join(bad))
        self.config = config
        self.seed = seed
        self.loop = loop if loop is not None else EventLoop()
        self.fabric_line_rate = config.speedup * config.line_rate
        self.delivery_hooks = []  # callables (packet) at egress completion

        self._queues: dict[tuple[int, int], _OutQueue] = {}
        self._port_flows: dict[int, dict[ServiceClass, list[int]]] = {}
        self._fq: dict[int, tuple[deque, deque]] = {}
        self._fq_bytes: dict[int, list[int]] = {}
        self._in_drain: dict[int, Packet | None] = {}
        self._in_tx: dict[int, Packet | None] = {}
        self._out_busy: dict[int, bool] = {}
        self._vtime: dict[tuple[int, ServiceClass], float] = {}
        self._occupancy = 0

        self._drop_prob: dict[tuple[int, int], float] = {}
        self._gb_state: dict[tuple[int, int], GbState] = {}
        self._pi_state: dict[tuple[int, int], PiState] = {}
        self._rep: dict[tuple[int, int], dict] = {}
        self._ledger: dict[int, _Ledger] = {}
        self._buckets: dict[tuple[int, int], _TokenBucket] = {}

        self._ingress_rng = [stream(seed, f"ingress.{i}")
                             for i in range(config.num_ports)]
        self._red_rng: dict[tuple[int, int], object] = {}

        fb = config.feedback
        self._delay_ns = ns(fb.delay)
        self._interval_ns = ns(fb.interval)
        self._report_ns = ns(config.report_interval
                             if config.report_interval is not None else fb.interval)
        if fb.mode == "gearbox":
            self._gb_params = GbParams(d_max=fb.d_max, d_min=fb.d_min,
                                       table_size=fb.table_size)
            self._drop_table = drop_level_table(self._gb_params.beta, fb.table_size)
        elif fb.mode == "pi":
            self._pi_params = PiParams(gain_p=fb.gain_p, gain_i=fb.gain_i,
                                       interval=fb.interval, alpha=fb.alpha,
                                       speedup=config.speedup,
                                       line_rate=config.line_rate)
        self._series = TimeSeries()
        self._started = False

    # --- setup ---------------------------------------------------------

    def register_flow_queue(self, egress: int, flow_id: int) -> None:
        """Create the output queue for (egress, flow) before the run starts."""
        key = (egress, flow_id)
        if key in self._queues:
            return
        if self._started:
            raise ValueError("cannot register queues after the run started")
        if flow_id not in self.config.flows:
            raise ValueError(f"flow {flow_id} not defined in the switch config")
        if not 0 <= egress < self.config.num_ports:
            raise ValueError(f"egress port {egress} out of range")
        spec = self.config.flows[flow_id]
        self._queues[key] = _OutQueue(egress, flow_id, spec.svc_class, spec.weight)
        port = self._port_flows.setdefault(egress, {
            ServiceClass.PREMIUM: [], ServiceClass.ASSURED: [],
            ServiceClass.BEST_EFFORT: []})
        port[spec.svc_class].append(flow_id)
        port[spec.svc_class].sort()
        if egress not in self._fq:
            self._fq[egress] = (deque(), deque())
            self._fq_bytes[egress] = [0, 0]
            self._in_drain[egress] = None
            self._in_tx[egress] = None
            self._out_busy[egress] = False
            self._vtime[(egress, ServiceClass.ASSURED)] = 0.0
            self._vtime[(egress, ServiceClass.BEST_EFFORT)] = 0.0
        self._drop_prob[key] = 0.0
        self._gb_state[key] = GbState()
        self._pi_state[key] = PiState()
        self._rep[key] = {f: 0 for f in _REP_FIELDS}
        self._rep[key]["delays"] = []
        self._red_rng[key] = stream(self.seed, f"red.{egress}.{flow_id}")
        self._ledger.setdefault(flow_id, _Ledger())

    # --- ingress ---------------------------------------------------------

    def ingress_arrival(self, packet: Packet) -> None:
        """Full ingress pipeline: policer, dropper, fabric admission."""
        key = (packet.egress_port, packet.flow_id)
        if key not in self._queues:
            raise ValueError(f"no queue registered for egress/flow {key}")
        packet.arrived_at = self.loop.now
        size = packet.size
        led = self._ledger[packet.flow_id]
        led.injected += size
        spec = self.config.flows[packet.flow_id]
        if packet.svc_class is ServiceClass.PREMIUM and spec.police_rate is not None:
            bkey = (packet.ingress_port, packet.flow_id)
            bucket = self._buckets.get(bkey)
            if bucket is None:
                bucket = _TokenBucket(spec.police_rate, spec.police_burst,
                                      self.loop.now)
                self._buckets[bkey] = bucket
            if not bucket.admit(size, self.loop.now):
                led.ingress_dropped += size
                self._rep[key]["ingress"] += size
                return
        rng = self._ingress_rng[packet.ingress_port]
        if not ingress_admit(packet, self._drop_prob[key], rng):
            led.ingress_dropped += size
            self._rep[key]["ingress"] += size
            return
        self.fabric_enqueue(packet)

    # --- fabric ----------------------------------------------------------

    def fabric_enqueue(self, packet: Packet) -> bool:
        """Admit into the shared pool; False when the packet was dropped.

        A full pool tail-drops arrivals of equal or lower priority without
        regard to flow. Higher-priority arrivals instead evict from the tail
        of the largest lower-priority fabric queue, so premium traffic cannot
        be squeezed out by a pool pinned full of assured backlog.
        """
        prio = 0 if packet.svc_class is ServiceClass.PREMIUM else 1
        size = packet.size
        if self._occupancy + size > self.config.fabric_memory:
            if prio == 0:
                self._evict_low_priority(
                    self._occupancy + size - self.config.fabric_memory)
            if self._occupancy + size > self.config.fabric_memory:
                self._count_fabric_drop(packet)
                return False
        self._occupancy += size
        j = packet.egress_port
        self._fq[j][prio].append(packet)
        self._fq_bytes[j][prio] += size
        if self._in_drain[j] is None:
            self._start_drain(j)
        return True

    def _evict_low_priority(self, needed: int) -> None:
        while needed > 0:
            victim_port = -1
            victim_bytes = -1
            for j in sorted(self._fq):
                if self._fq_bytes[j][1] > victim_bytes and self._fq[j][1]:
                    victim_bytes = self._fq_bytes[j][1]
                    victim_port = j
            if victim_port < 0:
                return
            victim = self._fq[victim_port][1].pop()
            self._fq_bytes[victim_port][1] -= victim.size
            self._occupancy -= victim.size
            needed -= victim.size
            self._count_fabric_drop(victim)

    def _count_fabric_drop(self, packet: Packet) -> None:
        self._ledger[packet.flow_id].fabric_dropped += packet.size
        self._rep[(packet.egress_port, packet.flow_id)]["fabric"] += packet.size

    def _start_drain(self, j: int) -> None:
        hi, lo = self._fq[j]
        queue, prio = (hi, 0) if hi else (lo, 1)
        packet = queue.popleft()
        self._fq_bytes[j][prio] -= packet.size
        self._occupancy -= packet.size
        self._in_drain[j] = packet
        self.loop.after(tx_ns(packet.size, self.fabric_line_rate),
                        lambda: self._drain_done(j), port=j, flow=packet.flow_id)

    def _drain_done(self, j: int) -> None:
        packet = self._in_drain[j]
        self._in_drain[j] = None
        self._enqueue_out(packet)
        hi, lo = self._fq[j]
        if hi or lo:
            self._start_drain(j)

    # --- output queues and scheduler --------------------------------------

    def _enqueue_out(self, packet: Packet) -> None:
        key = (packet.egress_port, packet.flow_id)
        oq = self._queues[key]
        size = packet.size
        oq.in_bytes += size
        drop = False
        if oq.backlog + size > self.config.out_queue_size:
            drop = True  # hard buffer bound applies under RED too
        elif self.config.red is not None:
            p = red_drop_probability(oq.red_avg, self.config.red)
            if p >= 1.0 or (p > 0.0 and self._red_rng[key].random() < p):
                drop = True
        if drop:
            oq.dropped_bytes += size
            self._ledger[packet.flow_id].egress_dropped += size
            self._rep[key]["egress"] += size
            return
        tag = 0.0
        if oq.svc_class is not ServiceClass.PREMIUM:
            vt = self._vtime[(packet.egress_port, oq.svc_class)]
            tag = max(oq.last_tag, vt) + size * 8.0 / oq.weight
            oq.last_tag = tag
        oq.packets.append((packet, tag))
        oq.backlog += size
        if not self._out_busy[packet.egress_port]:
            self._start_out(packet.egress_port)

    def out_scheduler_select(self, j: int) -> int | None:
        """Flow the output scheduler would serve next, None when idle.

        Premium queues have strict priority (lowest flow id first), then
        weighted-fair selection by smallest finish tag among assured queues,
        then the same among best-effort queues.
        """
        port = self._port_flows.get(j)
        if port is None:
            return None
        for fid in port[ServiceClass.PREMIUM]:
            if self._queues[(j, fid)].packets:
                return fid
        for tier in (ServiceClass.ASSURED, ServiceClass.BEST_EFFORT):
            best = None
            best_tag = 0.0
            for fid in port[tier]:
                q = self._queues[(j, fid)].packets
                if q and (best is None or q[0][1] < best_tag):
                    best = fid
                    best_tag = q[0][1]
            if best is not None:
                return best
        return None

    def _start_out(self, j: int) -> None:
        fid = self.out_scheduler_select(j)
        if fid is None:
            self._out_busy[j] = False
            return
        oq = self._queues[(j, fid)]
        packet, tag = oq.packets.popleft()
        oq.backlog -= packet.size
        if oq.svc_class is not ServiceClass.PREMIUM:
            self._vtime[(j, oq.svc_class)] = tag
        self._out_busy[j] = True
        self._in_tx[j] = packet
        self.loop.after(tx_ns(packet.size, self.config.line_rate),
                        lambda: self._out_done(j, packet), port=j, flow=fid)

    def _out_done(self, j: int, packet: Packet) -> None:
        key = (j, packet.flow_id)
        oq = self._queues[key]
        size = packet.size
        oq.out_bytes += size
        led = self._ledger[packet.flow_id]
        led.delivered += size
        rep = self._rep[key]
        rep["delivered"] += size
        rep["delays"].append(self.loop.now - packet.arrived_at)
        self._in_tx[j] = None
        for hook in self.delivery_hooks:
            hook(packet)
        self._start_out(j)

    # --- feedback ----------------------------------------------------------

    def sample_and_feedback(self, j: int, k: int):
        """Harvest one interval's queue counters and drive the controller.

        Returns the emitted gear-box signal, the emitted PI probability, or
        None when feedback is off or the interval carried no information.
        """
        key = (j, k)
        oq = self._queues[key]
        in_b, out_b, drop_b = oq.in_bytes, oq.out_bytes, oq.dropped_bytes
        oq.in_bytes = oq.out_bytes = oq.dropped_bytes = 0
        congestion = None
        if in_b > 0:
            congestion = 1.0 - out_b / in_b
            self._series.append(self.loop.now / NS, "rel_cong", j, k,
                                congestion, "ratio")
        fb = self.config.feedback
        if fb.mode == "off":
            return None
        if in_b == 0:
            return None  # empty interval: hold everything as-is
        measured = congestion if fb.measure == "relcong" else drop_b / in_b
        if fb.mode == "gearbox":
            signal = gb_signal_from_congestion(measured, self._gb_params)
            if signal is not FeedbackAction.HOLD:
                self.loop.after(self._delay_ns,
                                lambda: self._apply_gb(key, signal),
                                rank=RANK_CONTROL, port=j, flow=k)
            return signal
        interval = fb.interval
        rate_in = in_b * 8.0 / interval
        rate_out = out_b * 8.0 / interval
        desired = fb.alpha * self.config.speedup * rate_out
        rho, state = pi_update(self._pi_state[key], rate_in, desired,
                               self._pi_params)
        prob = drop_prob_from_rate(rho, rate_in, state.last_drop_prob)
        self._pi_state[key] = replace(state, last_drop_prob=prob)
        self.loop.after(self._delay_ns, lambda: self._apply_prob(key, prob),
                        rank=RANK_CONTROL, port=j, flow=k)
        return prob

    def _apply_gb(self, key, signal) -> None:
        state = apply_gb_signal(self._gb_state[key], signal,
                                self.config.feedback.table_size)
        self._gb_state[key] = state
        self._drop_prob[key] = self._drop_table[state.level]

    def _apply_prob(self, key, prob: float) -> None:
        self._drop_prob[key] = prob

    def drop_level(self, j: int, k: int) -> int:
        return self._gb_state[(j, k)].level

    # --- measurement -------------------------------------------------------

    def _report(self) -> None:
        t = self.loop.now / NS
        span = self._report_ns / NS
        for key in sorted(self._rep):
            j, k = key
            rep = self._rep[key]
            s = self._series
            s.append(t, "throughput_bps", j, k, rep["delivered"] * 8 / span, "bps")
            s.append(t, "ingress_drop_bps", j, k, rep["ingress"] * 8 / span, "bps")
            s.append(t, "fabric_drop_bps", j, k, rep["fabric"] * 8 / span, "bps")
            s.append(t, "egress_drop_bps", j, k, rep["egress"] * 8 / span, "bps")
            s.append(t, "out_queue_bytes", j, k, float(self._queues[key].backlog),
                     "bytes")
            delays = rep["delays"]
            if delays:
                delays.sort()
                mean = sum(delays) / len(delays) / NS
                p99 = delays[int(round(0.99 * (len(delays) - 1)))] / NS
                s.append(t, "delay_mean_s", j, k, mean, "s")
                s.append(t, "delay_p99_s", j, k, p99, "s")
            for f in _REP_FIELDS:
                rep[f] = 0
            rep["delays"] = []
        for j in sorted(self._fq):
            self._series.append(t, "fabric_queue_bytes", j, None,
                                float(sum(self._fq_bytes[j])), "bytes")
        self._series.append(t, "fabric_occupancy_bytes", None, None,
                            float(self._occupancy), "bytes")

    def _red_tick(self, key) -> None:
        oq = self._queues[key]
        w = self.config.red.weight
        oq.red_avg = (1.0 - w) * oq.red_avg + w * oq.backlog

    # --- run -----------------------------------------------------------

    def run(self, duration: float) -> TimeSeries:
        """Drive the loop for duration seconds and return the series."""
        if self._started:
            raise ValueError("run() may only be called once")
        self._started = True
        until = ns(duration)

        def tick(key, fn, period):
            def handler():
                fn()
                if self.loop.now + period <= until:
                    self.loop.at(self.loop.now + period, handler, rank=RANK_TICK,
                                 port=key[0], flow=key[1])
            return handler

        for key in sorted(self._queues):
            j, k = key
            handler = tick(key, lambda j=j, k=k: self.sample_and_feedback(j, k),
                           self._interval_ns)
            self.loop.at(self._interval_ns, handler, rank=RANK_TICK, port=j, flow=k)
            if self.config.red is not None:
                red_ns = ns(self.config.red.sample_interval)
                rh = tick(key, lambda key=key: self._red_tick(key), red_ns)
                self.loop.at(red_ns, rh, rank=RANK_TICK, port=j, flow=k)
        rep = tick((-1, -1), self._report, self._report_ns)
        self.loop.at(self._report_ns, rep, rank=RANK_TICK)

        self.loop.run(until)
        self._emit_totals(duration)
        return self._series

    def _emit_totals(self, duration: float) -> None:
        resident = self._resident_bytes()
        for fid in sorted(self._ledger):
            led = self._ledger[fid]
            for name, value in (
                ("injected_bytes_total", led.injected),
                ("ingress_drop_bytes_total", led.ingress_dropped),
                ("fabric_drop_bytes_total", led.fabric_dropped),
                ("egress_drop_bytes_total", led.egress_dropped),
                ("delivered_bytes_total", led.delivered),
                ("resident_bytes_total", resident.get(fid, 0)),
            ):
                self._series.append(duration, name, None, fid, float(value),
                                    "bytes")

    def _resident_bytes(self) -> dict[int, int]:
        """Bytes still inside the switch, by flow, from the live structures."""
        res: dict[int, int] = {fid: 0 for fid in self._ledger}
        for j in self._fq:
            for queue in self._fq[j]:
                for packet in queue:
                    res[packet.flow_id] += packet.size
            for packet in (self._in_drain[j], self._in_tx[j]):
                if packet is not None:
                    res[packet.flow_id] += packet.size
        for oq in self._queues.values():
            for packet, _tag in oq.packets:
                res[packet.flow_id] += packet.size
        return res

    def conservation(self) -> dict[int, dict]:
        """Per-flow byte accounting; 'balanced' is an exact integer identity."""
        resident = self._resident_bytes()
        out = {}
        for fid, led in self._ledger.items():
            r = resident.get(fid, 0)
            out[fid] = {
                "injected": led.injected,
                "ingress_dropped": led.ingress_dropped,
                "fabric_dropped": led.fabric_dropped,
                "egress_dropped": led.egress_dropped,
                "delivered": led.delivered,
                "resident": r,
                "balanced": led.injected == (led.ingress_dropped
                                             + led.fabric_dropped
                                             + led.egress_dropped
                                             + led.delivered + r),
            }
        return out

    @property
    def fabric_occupancy(self) -> int:
        return self._occupancy

    def drop_probability(self, j: int, k: int) -> float:
        return self._drop_prob[(j, k)]
