"""Client-side playback modelling: joining time, buffer occupancy, stalls.

The buffer timeline is the difference of the cumulative arrival and
consumption series.  Consumption starts at the joining time, runs at one
content-second per wall second, halts whenever the buffer empties (a stall)
and resumes once resume_threshold_s of content is available again.
Buffered bytes are converted to seconds through the stream's encoding-rate
trace, so VBR streams are handled exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .radio import promotion_latency
from .streams import LinkModel, PacketEvent, StreamSpec
from .techniques import RESUME_THRESHOLD_S, START_THRESHOLD_S, Technique

_EPS = 1e-9

JOIN_FAILURE_S = math.inf   # sentinel: the session can never start


@dataclass(frozen=True)
class BufferSample:
    t_s: float
    buffered_seconds: float
    buffered_bytes: float


@dataclass
class BufferTimeline:
    joining_time_s: float
    playback_end_s: float          # wall time playback finished (or horizon)
    duration_s: float              # content seconds actually watched
    samples: list[BufferSample] = field(default_factory=list)
    resume_threshold_s: float = RESUME_THRESHOLD_S
    completed: bool = True         # playback reached the watch end

    CSV_HEADER = "t_s,buffered_seconds,buffered_bytes"

    def to_csv_lines(self) -> list[str]:
        lines = [self.CSV_HEADER]
        for s in self.samples:
            lines.append(f"{s.t_s:.6f},{s.buffered_seconds:.6f},"
                         f"{s.buffered_bytes:.1f}")
        return lines

    def value_at(self, t_s: float) -> float:
        """Buffered seconds at wall time t_s.

        Between samples the buffer can only drain (arrivals always create a
        sample), so interpolation assumes a unit drain while playing.
        """
        prev: Optional[BufferSample] = None
        for s in self.samples:
            if s.t_s > t_s + _EPS:
                break
            prev = s
        if prev is None:
            return 0.0
        drain = (t_s - prev.t_s
                 if not math.isinf(self.joining_time_s)
                 and t_s > self.joining_time_s else 0.0)
        return max(prev.buffered_seconds - drain, 0.0)


@dataclass
class QoeReport:
    joining_time_s: float
    stall_events: list[tuple[float, float]]   # (t_start_s, duration_s)
    stall_ratio: float

    @property
    def stall_total_s(self) -> float:
        return sum(d for _, d in self.stall_events)


def joining_time(tech: Technique, stream: StreamSpec, link: LinkModel,
                 radio_tech: str,
                 start_threshold_s: float = START_THRESHOLD_S) -> float:
    """Initial playback delay: radio promotion, one request round trip and
    the fast-start fill of the start threshold at the available bandwidth.

    Returns inf when the link can never move the starting bytes.
    """
    promo = promotion_latency(radio_tech)
    bytes_needed = stream.bytes_for_content(0.0, start_threshold_s)
    if bytes_needed <= 0:
        return promo + link.rtt_s
    fill = link.transfer_time(link.rtt_s, bytes_needed)
    if math.isinf(fill):
        return JOIN_FAILURE_S
    return promo + link.rtt_s + fill


def compute_buffer(arrivals: Iterable[PacketEvent], stream: StreamSpec,
                   joining_time_s: float,
                   resume_threshold_s: float = RESUME_THRESHOLD_S,
                   watch_end_s: Optional[float] = None) -> BufferTimeline:
    """Build the playback-buffer timeline from data arrivals.

    Only data events feed the buffer.  The buffer is clipped at zero: when
    it empties during playback, consumption halts until the resume
    threshold is met again, and the zero span shows up in the samples.
    watch_end_s bounds consumption for abandoned sessions.
    """
    data = sorted((e for e in arrivals if e.kind == "data"),
                  key=lambda e: e.t_s)
    prev_t = 0.0
    for e in data:
        if e.t_s < prev_t - _EPS:
            raise ValueError("arrivals must be sorted by time")
        prev_t = e.t_s
    join = joining_time_s
    watched = stream.duration_s if watch_end_s is None else min(
        watch_end_s, stream.duration_s)

    tl = BufferTimeline(join, 0.0, watched,
                        resume_threshold_s=resume_threshold_s)
    samples = tl.samples
    state = {"t": 0.0, "fill": 0.0, "play": 0.0, "started": False,
             "stalled": False, "done_at": None}

    def emit() -> None:
        buffered = max(state["fill"] - state["play"], 0.0)
        samples.append(BufferSample(
            state["t"], buffered,
            max(stream.bytes_for_content(state["play"], state["fill"]), 0.0)))

    def drain_to(to_t: float) -> None:
        while state["t"] < to_t - 1e-12:
            if not state["started"]:
                if math.isinf(join) or to_t < join:
                    state["t"] = to_t
                    return
                state["t"] = join
                state["started"] = True
                if state["fill"] - state["play"] <= _EPS:
                    state["stalled"] = True
                emit()
                continue
            if state["done_at"] is not None or state["stalled"]:
                state["t"] = to_t
                return
            span = min(to_t - state["t"],
                       state["fill"] - state["play"],
                       watched - state["play"])
            if span > 0:
                state["play"] += span
                state["t"] += span
            if state["play"] >= watched - 1e-9:
                state["done_at"] = state["t"]
                emit()
                state["t"] = to_t
                return
            if state["fill"] - state["play"] <= _EPS:
                if state["t"] < to_t - 1e-12:
                    state["stalled"] = True
                    emit()
                else:
                    return

    emit()
    for e in data:
        drain_to(e.t_s)
        if state["done_at"] is not None:
            break
        state["fill"] = min(
            state["fill"] + stream.seconds_for_bytes(state["fill"], e.bytes),
            stream.duration_s)
        if (state["stalled"]
                and state["fill"] - state["play"] >= resume_threshold_s - 1e-9):
            state["stalled"] = False
        emit()

    if state["done_at"] is None and not math.isinf(join):
        drain_to(max(state["t"], join) + _EPS)
        if not state["stalled"]:
            drain_to(state["t"] + max(state["fill"] - state["play"], 0.0) + _EPS)

    completed = state["done_at"] is not None
    if completed:
        end = state["done_at"]
    elif math.isinf(join):
        end = watched
    else:
        # unresolved stall: close the timeline at the nominal horizon
        end = join + watched + _zero_span_total(samples, after=join)
    tl.playback_end_s = end
    tl.completed = completed
    if not samples or samples[-1].t_s < end - _EPS:
        buffered = 0.0 if not completed else max(
            state["fill"] - state["play"], 0.0)
        samples.append(BufferSample(end, buffered, buffered
                                    * stream.bytes_per_second))
    return tl


def _zero_span_total(samples: list[BufferSample], after: float = 0.0) -> float:
    total = 0.0
    for a, b in zip(samples, samples[1:]):
        if a.buffered_seconds <= _EPS and a.t_s >= after - _EPS:
            total += b.t_s - a.t_s
    return total


def detect_stalls(buffer: BufferTimeline,
                  resume_threshold_s: float = RESUME_THRESHOLD_S) -> QoeReport:
    """Extract stall events from a buffer timeline.

    A stall opens when the buffer hits zero during playback and closes when
    buffered content reaches the resume threshold (or never, in which case
    it runs to the end of the timeline).
    """
    if math.isinf(buffer.joining_time_s):
        return QoeReport(JOIN_FAILURE_S,
                         [(0.0, buffer.playback_end_s)],
                         1.0)
    events: list[tuple[float, float]] = []
    join = buffer.joining_time_s
    open_at: Optional[float] = None
    for s in buffer.samples:
        if s.t_s < join - _EPS:
            continue
        if open_at is None:
            if (s.buffered_seconds <= _EPS
                    and s.t_s < buffer.playback_end_s - 1e-9):
                open_at = s.t_s
        elif s.buffered_seconds >= resume_threshold_s - 1e-6:
            events.append((open_at, s.t_s - open_at))
            open_at = None
    if open_at is not None and buffer.playback_end_s - open_at > 1e-6:
        events.append((open_at, buffer.playback_end_s - open_at))
    total = sum(d for _, d in events)
    return QoeReport(joining_time_s=join, stall_events=events,
                     stall_ratio=total / buffer.duration_s)
