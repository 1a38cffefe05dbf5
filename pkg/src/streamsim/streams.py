"""Stream, link and wire-event primitives shared across the simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

EVENT_KINDS = ("data", "flow_control", "persist_probe", "request")
_KIND_ORDER = {k: i for i, k in enumerate(EVENT_KINDS)}

# Wire sizes for control traffic.
REQUEST_BYTES = 500
PROBE_BYTES = 60
FLOW_CONTROL_BYTES = 60


@dataclass(frozen=True)
class PacketEvent:
    """One delivery event on the wire."""
    t_s: float
    bytes: int
    connection_id: int
    kind: str = "data"

    def __post_init__(self):
        if self.t_s < 0:
            raise ValueError("event time must be >= 0")
        if self.bytes < 0:
            raise ValueError("event bytes must be >= 0")
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.kind in ("flow_control", "persist_probe") and self.bytes > 100:
            raise ValueError("control events carry at most 100 bytes")

    def sort_key(self):
        return (self.t_s, self.connection_id, _KIND_ORDER[self.kind])


@dataclass(frozen=True)
class StreamSpec:
    """A constant- or variable-bitrate video stream.

    size_bytes defaults to duration * rate / 8.  When a VBR trace is given
    as (t_s, instantaneous_rate_bps) breakpoints, its integral over the
    duration must match size_bytes within 1%.
    """
    duration_s: float
    encoding_rate_bps: float
    size_bytes: Optional[float] = None
    vbr_trace: Optional[list[tuple[float, float]]] = None
    keyframe_interval_bytes: Optional[float] = None

    def __post_init__(self):
        if self.duration_s <= 0 or self.encoding_rate_bps <= 0:
            raise ValueError("duration_s and encoding_rate_bps must be > 0")
        if self.size_bytes is None:
            object.__setattr__(self, "size_bytes",
                               self.duration_s * self.encoding_rate_bps / 8.0)
        if self.size_bytes <= 0:
            raise ValueError("size_bytes must be > 0")
        if self.vbr_trace is not None:
            tr = sorted(self.vbr_trace)
            if not tr or tr[0][0] > 0:
                tr = [(0.0, self.encoding_rate_bps)] + tr
            object.__setattr__(self, "vbr_trace", tr)
            integral = self._vbr_bytes_between(0.0, self.duration_s)
            if abs(integral - self.size_bytes) > 0.01 * self.size_bytes:
                raise ValueError(
                    f"VBR trace integrates to {integral:.0f} B, "
                    f"size_bytes is {self.size_bytes:.0f} B (>1% apart)")

    @property
    def bytes_per_second(self) -> float:
        return self.encoding_rate_bps / 8.0

    def _vbr_bytes_between(self, a: float, b: float) -> float:
        total = 0.0
        tr = self.vbr_trace
        for i, (t0, rate) in enumerate(tr):
            t1 = tr[i + 1][0] if i + 1 < len(tr) else max(b, t0)
            lo, hi = max(a, t0), min(b, t1)
            if hi > lo:
                total += rate * (hi - lo) / 8.0
        return total

    def bytes_for_content(self, a_s: float, b_s: float) -> float:
        """Bytes of content between playback positions a_s and b_s."""
        if self.vbr_trace is None:
            return (b_s - a_s) * self.bytes_per_second
        return self._vbr_bytes_between(a_s, b_s)

    def seconds_for_bytes(self, from_pos_s: float, nbytes: float) -> float:
        """Content seconds covered by nbytes starting at position from_pos_s."""
        if self.vbr_trace is None:
            return nbytes / self.bytes_per_second
        left = nbytes
        pos = from_pos_s
        tr = self.vbr_trace
        for i, (t0, rate) in enumerate(tr):
            t1 = tr[i + 1][0] if i + 1 < len(tr) else math.inf
            if t1 <= pos:
                continue
            lo = max(pos, t0)
            span_bytes = rate * (t1 - lo) / 8.0
            if span_bytes >= left or t1 is math.inf:
                return (lo - from_pos_s) + left * 8.0 / rate
            left -= span_bytes
            pos = t1
        return pos - from_pos_s


@dataclass(frozen=True)
class LinkModel:
    """Piecewise-constant available bandwidth plus a round-trip time."""
    segments: tuple[tuple[float, float], ...]  # (t_start_s, bandwidth_bps)
    rtt_ms: float = 70.0

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ValueError("link needs at least one segment")
        if segs[0][0] != 0.0:
            raise ValueError("first link segment must start at t=0")
        prev = -math.inf
        for t0, bw in segs:
            if t0 <= prev:
                raise ValueError("link segments must be strictly ordered")
            if bw < 0:
                raise ValueError("bandwidth must be >= 0")
            prev = t0
        object.__setattr__(self, "segments", segs)

    @classmethod
    def constant(cls, bandwidth_bps: float, rtt_ms: float = 70.0) -> "LinkModel":
        return cls(((0.0, bandwidth_bps),), rtt_ms)

    @property
    def rtt_s(self) -> float:
        return self.rtt_ms / 1000.0

    def bandwidth_at(self, t_s: float) -> float:
        bw = self.segments[0][1]
        for t0, b in self.segments:
            if t0 <= t_s:
                bw = b
            else:
                break
        return bw

    def next_change_after(self, t_s: float) -> float:
        for t0, _ in self.segments:
            if t0 > t_s:
                return t0
        return math.inf

    def bytes_capacity(self, a_s: float, b_s: float) -> float:
        """Maximum bytes the link can carry over [a_s, b_s]."""
        total, t = 0.0, a_s
        while t < b_s:
            nxt = min(b_s, self.next_change_after(t))
            total += self.bandwidth_at(t) * (nxt - t) / 8.0
            t = nxt
        return total

    def transfer_time(self, start_s: float, nbytes: float,
                      rate_cap_bps: float = math.inf) -> float:
        """Seconds to move nbytes starting at start_s under the link and cap.

        Returns inf when the remaining capacity never suffices.
        """
        remaining = nbytes
        t = start_s
        for _ in range(100000):
            if remaining <= 1e-9:
                return t - start_s
            rate = min(self.bandwidth_at(t), rate_cap_bps)
            nxt = self.next_change_after(t)
            if rate <= 0:
                if nxt is math.inf:
                    return math.inf
                t = nxt
                continue
            span = nxt - t
            can = rate * span / 8.0
            if can >= remaining or nxt is math.inf:
                return t + remaining * 8.0 / rate - start_s
            remaining -= can
            t = nxt
        return math.inf
