"""Measurement records and their CSV form.

One record per (time, metric, port, flow); aggregates leave port/flow blank.
CSV is UTF-8 with LF newlines and round-trips exactly: floats are written
with repr so equal seeds give bit-identical files.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

COLUMNS = ("t_sec", "metric", "port", "flow", "value", "unit")


@dataclass(frozen=True)
class Record:
    t: float
    metric: str
    port: int | None
    flow: int | None
    value: float
    unit: str


class TimeSeries:
    """Ordered list of records with selection and CSV helpers."""

    def __init__(self, records: list[Record] | None = None):
        self.records: list[Record] = list(records) if records else []

    def append(self, t, metric, port, flow, value, unit):
        self.records.append(Record(t, metric, port, flow, value, unit))

    def select(self, metric: str, port: int | None = None,
               flow: int | None = None) -> list[Record]:
        """Records for one metric, optionally narrowed to a port and flow."""
        out = []
        for r in self.records:
            if r.metric != metric:
                continue
            if port is not None and r.port != port:
                continue
            if flow is not None and r.flow != flow:
                continue
            out.append(r)
        return out

    def value_at_end(self, metric: str, port=None, flow=None) -> float:
        rows = self.select(metric, port, flow)
        if not rows:
            raise KeyError(f"no records for {metric}")
        return rows[-1].value

    def __eq__(self, other):
        return isinstance(other, TimeSeries) and self.records == other.records

    def __len__(self):
        return len(self.records)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in self.records:
            writer.writerow([
                repr(r.t),
                r.metric,
                "" if r.port is None else r.port,
                "" if r.flow is None else r.flow,
                repr(r.value),
                r.unit,
            ])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TimeSeries":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if tuple(header) != COLUMNS:
            raise ValueError(f"unexpected header {header!r}")
        records = []
        for row in reader:
            if not row:
                continue
            t, metric, port, flow, value, unit = row
            records.append(Record(
                float(t), metric,
                None if port == "" else int(port),
                None if flow == "" else int(flow),
                float(value), unit,
            ))
        return cls(records)


def sliding_window(series: TimeSeries, width: float) -> TimeSeries:
    """Trailing moving average over each (metric, port, flow) group.

    The native step is taken from each group's first two timestamps; width
    must not undercut it. End-of-run *_total records pass through untouched.
    Head points average over however many samples exist, so a constant
    series survives unchanged and a B-byte impulse in a zero background
    smears into rate B/width for exactly width seconds.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    groups: dict = {}
    for r in series.records:
        groups.setdefault((r.metric, r.port, r.flow), []).append(r)

    smoothed: dict = {}
    for key, rows in groups.items():
        if key[0].endswith("_total") or len(rows) < 2:
            continue
        native = rows[1].t - rows[0].t
        if native <= 0:
            continue
        if width < native - 1e-12:
            raise ValueError("window narrower than the native sampling interval")
        k = max(1, int(round(width / native)))
        if k == 1:
            continue
        acc = 0.0
        vals = [r.value for r in rows]
        means = []
        for i, v in enumerate(vals):
            acc += v
            if i >= k:
                acc -= vals[i - k]
            means.append(acc / min(i + 1, k))
        smoothed[key] = means

    out = TimeSeries()
    position: dict = {}
    for r in series.records:
        key = (r.metric, r.port, r.flow)
        if key in smoothed:
            i = position.get(key, 0)
            position[key] = i + 1
            out.append(r.t, r.metric, r.port, r.flow, smoothed[key][i], r.unit)
        else:
            out.records.append(r)
    return out
