"""Traffic sources: constant bit rate and a compact Reno-style TCP.

Sources are event-loop citizens. A CBR source injects straight into a sink
(normally Switch.ingress_arrival) on a fixed integer-nanosecond period. A TCP
source transmits through an AccessLink that models its subnet uplink, infers
loss from duplicate acknowledgements and retransmission timeouts, and keeps
its receiver state in the same object so an experiment only has to route
delivered packets back by source id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .events import NS, RANK_DATA, ns, stream, tx_ns
from .switch import Packet, ServiceClass


class CbrSource:
    """Fixed-size packets on a constant period, [start, stop) seconds."""

    def __init__(self, loop, sink, flow_id: int, ingress_port: int,
                 egress_port: int, packet_size: int, rate_bps: float,
                 svc_class: ServiceClass = ServiceClass.ASSURED,
                 start: float = 0.0, stop: float | None = None,
                 source_id: int = 0):
        if packet_size <= 0 or rate_bps <= 0:
            raise ValueError("packet_size and rate_bps must be positive")
        self.loop = loop
        self.sink = sink
        self.flow_id = flow_id
        self.ingress_port = ingress_port
        self.egress_port = egress_port
        self.packet_size = packet_size
        self.rate_bps = rate_bps
        self.svc_class = svc_class
        self.source_id = source_id
        self.period_ns = tx_ns(packet_size, rate_bps)
        self._start_ns = ns(start)
        self._stop_ns = None if stop is None else ns(stop)
        self.seq = 0

    def start(self) -> None:
        if self._stop_ns is None or self._start_ns < self._stop_ns:
            self.loop.at(self._start_ns, self._emit, rank=RANK_DATA,
                         port=self.ingress_port, flow=self.flow_id)

    def _emit(self) -> None:
        now = self.loop.now
        self.sink(Packet(self.flow_id, self.ingress_port, self.egress_port,
                         self.packet_size, self.svc_class, created_at=now,
                         seq=self.seq, source=self.source_id))
        self.seq += 1
        nxt = now + self.period_ns
        if self._stop_ns is None or nxt < self._stop_ns:
            self.loop.at(nxt, self._emit, rank=RANK_DATA,
                         port=self.ingress_port, flow=self.flow_id)


class AccessLink:
    """FIFO rate limiter with a finite drop-tail buffer in front of a sink."""

    def __init__(self, loop, rate_bps: float, buffer_bytes: int, sink):
        self.loop = loop
        self.rate_bps = rate_bps
        self.buffer_bytes = buffer_bytes
        self.sink = sink
        self._queue = []
        self._head = 0
        self._qbytes = 0
        self._busy = False
        self.dropped_packets = 0
        self.dropped_bytes = 0

    def send(self, packet: Packet) -> bool:
        if self._qbytes + packet.size > self.buffer_bytes:
            self.dropped_packets += 1
            self.dropped_bytes += packet.size
            return False
        self._queue.append(packet)
        self._qbytes += packet.size
        if not self._busy:
            self._next()
        return True

    def _next(self) -> None:
        if self._head >= len(self._queue):
            self._queue = []
            self._head = 0
            self._busy = False
            return
        packet = self._queue[self._head]
        self._head = self._head + 1
        if self._head > 512:  # keep the backing list from growing unbounded
            del self._queue[:self._head]
            self._head = 0
        self._qbytes -= packet.size
        self._busy = True

        def done():
            self.sink(packet)
            self._next()

        self.loop.after(tx_ns(packet.size, self.rate_bps), done,
                        rank=RANK_DATA, port=packet.ingress_port,
                        flow=packet.flow_id)

    @property
    def queued_bytes(self) -> int:
        return self._qbytes


class TcpSource:
    """Reno-flavoured TCP endpoint pair collapsed into one object.

    Sender side: slow start, congestion avoidance, fast retransmit on three
    duplicate acks, retransmission timeout with exponential backoff and
    RFC 6298 RTT smoothing (Karn's rule: no samples from retransmits).
    Receiver side: cumulative acks with out-of-order buffering. The forward
    path is the access link plus the switch; 'one_way' covers propagation of
    the delivered data to the receiver and of the ack back, so the base
    round trip is twice that plus queueing.
    """

    INIT_CWND = 2.0
    INIT_SSTHRESH = 64
    MAX_CWND = 64.0
    INIT_RTO = 1.0     # seconds, before the first RTT sample
    MIN_RTO = 0.2
    MAX_BACKOFF = 64

    def __init__(self, loop, link, source_id: int, flow_id: int,
                 ingress_port: int, egress_port: int, packet_size: int = 1040,
                 one_way: float = 20e-3,
                 svc_class: ServiceClass = ServiceClass.ASSURED):
        self.loop = loop
        self.link = link
        self.source_id = source_id
        self.flow_id = flow_id
        self.ingress_port = ingress_port
        self.egress_port = egress_port
        self.packet_size = packet_size
        self.svc_class = svc_class
        self._rtt_ns = 2 * ns(one_way)

        self.cwnd = self.INIT_CWND
        self.ssthresh = self.INIT_SSTHRESH
        self.snd_una = 0
        self.next_seq = 0
        self.dup_acks = 0
        self.in_recovery = False
        self.recover_point = 0
        self.backoff = 1
        self.srtt = None
        self.rttvar = 0.0
        self.rto = self.INIT_RTO
        self._send_time: dict[int, int] = {}
        self._rexmit: set[int] = set()
        self._timer_gen = 0

        self.rcv_next = 0
        self._ooo: set[int] = set()

        self.packets_sent = 0
        self.retransmits = 0
        self.timeouts = 0

    def start_at(self, start_ns: int) -> None:
        self.loop.at(start_ns, self._try_send, rank=RANK_DATA,
                     port=self.ingress_port, flow=self.flow_id)

    # --- sender ------------------------------------------------------------

    def _emit(self, seq: int) -> None:
        self.packets_sent += 1
        self.link.send(Packet(self.flow_id, self.ingress_port,
                              self.egress_port, self.packet_size,
                              self.svc_class, created_at=self.loop.now,
                              seq=seq, source=self.source_id))

    def _try_send(self) -> None:
        window = self.snd_una + int(self.cwnd)
        sent = False
        while self.next_seq < window:
            self._emit(self.next_seq)
            if self.next_seq not in self._send_time:
                self._send_time[self.next_seq] = self.loop.now
            self.next_seq += 1
            sent = True
        if sent:
            self._arm_timer()

    def _arm_timer(self) -> None:
        self._timer_gen += 1
        gen = self._timer_gen
        delay = ns(min(self.rto * self.backoff, 120.0))
        self.loop.after(delay, lambda: self._timer_fire(gen), rank=RANK_DATA,
                        port=self.ingress_port, flow=self.flow_id)

    def _timer_fire(self, gen: int) -> None:
        if gen != self._timer_gen or self.snd_una == self.next_seq:
            return
        self.timeouts += 1
        self.ssthresh = max(int(self.cwnd) // 2, 2)
        self.cwnd = 1.0
        self.in_recovery = False
        self.dup_acks = 0
        self.backoff = min(self.backoff * 2, self.MAX_BACKOFF)
        self._retransmit(self.snd_una)
        self._arm_timer()

    def _retransmit(self, seq: int) -> None:
        self._rexmit.add(seq)
        self.retransmits += 1
        self.packets_sent -= 1  # _emit counts it again
        self._emit(seq)

    def _handle_ack(self, ackno: int) -> None:
        if ackno > self.snd_una:
            newly = ackno - self.snd_una
            sample_seq = ackno - 1
            if sample_seq in self._send_time and sample_seq not in self._rexmit:
                self._rtt_sample((self.loop.now
                                  - self._send_time[sample_seq]) / NS)
            for seq in range(self.snd_una, ackno):
                self._send_time.pop(seq, None)
                self._rexmit.discard(seq)
            self.snd_una = ackno
            self.dup_acks = 0
            self.backoff = 1
            if self.in_recovery:
                if ackno >= self.recover_point:
                    self.in_recovery = False
                    self.cwnd = float(self.ssthresh)
                else:
                    self._retransmit(self.snd_una)  # partial ack
            elif self.cwnd < self.ssthresh:
                self.cwnd = min(self.cwnd + newly, self.MAX_CWND)
            else:
                self.cwnd = min(self.cwnd + newly / self.cwnd, self.MAX_CWND)
            if self.snd_una == self.next_seq:
                self._timer_gen += 1  # nothing outstanding, cancel
            else:
                self._arm_timer()
            self._try_send()
        elif self.snd_una < self.next_seq:
            self.dup_acks += 1
            if self.dup_acks == 3 and not self.in_recovery:
                self.ssthresh = max(int(self.cwnd) // 2, 2)
                self.cwnd = float(self.ssthresh)
                self.in_recovery = True
                self.recover_point = self.next_seq
                self._retransmit(self.snd_una)
                self._arm_timer()

    def _rtt_sample(self, r: float) -> None:
        if self.srtt is None:
            self.srtt = r
            self.rttvar = r / 2.0
        else:
            self.rttvar = 0.75 * self.rttvar + 0.25 * abs(self.srtt - r)
            self.srtt = 0.875 * self.srtt + 0.125 * r
        self.rto = max(self.MIN_RTO, self.srtt + 4.0 * self.rttvar)

    # --- receiver ------------------------------------------------------------

    def on_data_arrival(self, packet: Packet) -> None:
        """Receiver ingest at egress delivery; acks come back a round trip
        later (receiver propagation plus the return path)."""
        seq = packet.seq
        if seq == self.rcv_next:
            self.rcv_next += 1
            while self.rcv_next in self._ooo:
                self._ooo.discard(self.rcv_next)
                self.rcv_next += 1
        elif seq > self.rcv_next:
            self._ooo.add(seq)
        ackno = self.rcv_next
        self.loop.after(self._rtt_ns, lambda: self._handle_ack(ackno),
                        rank=RANK_DATA, port=self.ingress_port,
                        flow=self.flow_id)

    @property
    def delivered_segments(self) -> int:
        return self.rcv_next


@dataclass
class SubnetGroup:
    """Sources sharing one access link, started inside a time window."""

    name: str
    sources: list = field(default_factory=list)
    window: tuple[float, float] = (0.0, 0.0)


def staged_start(groups: list[SubnetGroup], seed: int) -> dict[int, float]:
    """Give every source a uniform start time inside its group's window.

    Draws come from one named stream in deterministic group and source
    order, so the schedule depends only on the seed and the group layout.
    Returns source_id -> start seconds and arms each source.
    """
    rng = stream(seed, "starts")
    starts: dict[int, float] = {}
    for group in groups:
        t0, t1 = group.window
        for src in group.sources:
            t = t0 + rng.random() * (t1 - t0)
            starts[src.source_id] = t
            src.start_at(ns(t))
    return starts
