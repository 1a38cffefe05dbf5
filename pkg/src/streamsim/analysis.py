"""Tradeoff studies: abandonment penalty, buffer-size/power curves and
playback-buffer threshold recommendations.

Sweep averages use the total device current (radio plus playback) over the
watched wall time, which is what a power trace of the handset shows.
Results are deterministic: identical scenario and grid give identical
SweepResult contents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .scenario import Scenario
from .session import run_session
from .streams import LinkModel, StreamSpec
from .techniques import FastCaching, OnOffM, technique_kind


@dataclass(frozen=True)
class SweepPoint:
    x: float
    avg_current_ma: float
    relative_power: float
    bytes_wasted: float
    stall_total_s: float


@dataclass
class SweepResult:
    axis: str
    points: list[SweepPoint] = field(default_factory=list)
    fingerprint: str = ""
    notes: list[str] = field(default_factory=list)

    CSV_HEADER = "x,avg_current_mA,relative_power,bytes_wasted,stall_total_s"

    def to_csv_lines(self) -> list[str]:
        lines = [self.CSV_HEADER]
        for p in self.points:
            lines.append(f"{p.x:.6g},{p.avg_current_ma:.6f},"
                         f"{p.relative_power:.6f},{p.bytes_wasted:.1f},"
                         f"{p.stall_total_s:.6f}")
        return lines


def _finish(axis: str, rows: list[tuple[float, float, float, float]],
            fingerprint: str, notes: list[str]) -> SweepResult:
    rows.sort(key=lambda r: r[0])
    base = rows[0][1] if rows else 1.0
    pts = [SweepPoint(x, cur, cur / base if base > 0 else math.nan, waste, st)
           for x, cur, waste, st in rows]
    return SweepResult(axis=axis, points=pts, fingerprint=fingerprint,
                       notes=notes)


def abandonment_sweep(scenario: Scenario,
                      watch_fractions: Sequence[float],
                      techniques: Optional[dict] = None
                      ) -> dict[str, SweepResult]:
    """Average total current as a function of the watched fraction.

    Runs the sweep for each technique in `techniques` (by default the
    scenario's own technique compared against fast caching, the pair whose
    abandonment penalties differ the most).  The wasted-bytes column counts
    downloaded-but-unwatched data.
    """
    fr = sorted(watch_fractions)
    if not fr:
        raise ValueError("watch_fractions must not be empty")
    if any(w <= 0 or w > 1.0 for w in fr):
        raise ValueError("watch fractions must lie in (0, 1]")
    if techniques is None:
        techniques = {technique_kind(scenario.technique): scenario.technique}
        if not isinstance(scenario.technique, FastCaching):
            techniques["fast_caching"] = FastCaching()
    out: dict[str, SweepResult] = {}
    for name, tech in techniques.items():
        rows = []
        for w in fr:
            sc = replace(scenario, technique=tech,
                         abandon_at_s=w * scenario.stream.duration_s)
            res = run_session(sc)
            s = res.summary
            wasted = max(s.bytes_downloaded - s.bytes_consumed, 0.0)
            rows.append((w, s.avg_total_current_ma, wasted, s.stall_total_s))
        out[name] = _finish("watch_fraction", rows, scenario.fingerprint(), [])
    return out


def buffer_size_sweep(scenario: Scenario,
                      dynamic_buffer_sizes_s: Sequence[float],
                      c_over_s_ratios: Sequence[float] = (2.0, 4.0, 8.0)
                      ) -> dict[float, SweepResult]:
    """Relative power draw as a function of the dynamic buffer size.

    The scenario's technique must be buffer-adaptive multi-connection; its
    upper threshold stays fixed while the lower one is upper - size.  One
    curve per bandwidth-to-encoding-rate ratio, each normalised to its
    smallest swept buffer size.
    """
    if not isinstance(scenario.technique, OnOffM):
        raise ValueError("buffer-size sweep needs an on_off_m technique")
    sizes = sorted(dynamic_buffer_sizes_s)
    if not sizes or any(s <= 0 for s in sizes):
        raise ValueError("buffer sizes must be > 0")
    upper = scenario.technique.upper_s
    out: dict[float, SweepResult] = {}
    for ratio in c_over_s_ratios:
        link = LinkModel.constant(ratio * scenario.stream.encoding_rate_bps,
                                  scenario.link.rtt_ms)
        rows = []
        notes: list[str] = []
        for size in sizes:
            if size > upper:
                notes.append(f"size {size:g}s exceeds upper threshold "
                             f"{upper:g}s: skipped")
                continue
            tech = replace(scenario.technique, lower_s=upper - size,
                           off_fixed_s=None)
            sc = replace(scenario, technique=tech, link=link)
            res = run_session(sc)
            s = res.summary
            rows.append((size, s.avg_total_current_ma, s.bytes_wasted,
                         s.stall_total_s))
        out[ratio] = _finish("dynamic_buffer_s", rows, scenario.fingerprint(),
                             notes)
    return out


def recommend_thresholds(stream: StreamSpec, link: LinkModel,
                         radio_tech: str) -> tuple[float, float, str]:
    """Playback-buffer threshold recommendation for buffer-adaptive delivery.

    Returns (upper_s, lower_s, rationale).  The defaults follow the
    observed sweet spot: an upper threshold worth 100 s of content and a
    lower one worth 40 s, a 60 s dynamic buffer, beyond which extra buffer
    stops paying for itself.  The rationale also translates a fixed 20 MB
    byte buffer into seconds at this stream's encoding rate for comparison.
    """
    upper_s, lower_s = 100.0, 40.0
    r = stream.encoding_rate_bps
    fixed_buffer_equiv_s = 20e6 * 8.0 / r
    spare = link.bandwidth_at(0.0) / r if r > 0 else math.inf
    lines = [
        f"upper={upper_s:.0f}s, lower={lower_s:.0f}s of content "
        f"({upper_s - lower_s:.0f}s dynamic buffer).",
        f"A fixed 20 MB buffer equals {fixed_buffer_equiv_s:.0f}s at "
        f"{r / 1e3:.0f} kbps.",
        "Dynamic buffers beyond 40-50s stop reducing average power "
        "noticeably.",
    ]
    if spare < 2.0:
        lines.append(
            f"Available bandwidth is only {spare:.1f}x the encoding rate on "
            f"{radio_tech}: keep the lower threshold at 30-40s of content "
            "to ride out bandwidth dips.")
    return upper_s, lower_s, " ".join(lines)


def equivalent_buffer_seconds(buffer_bytes: float, encoding_rate_bps: float
                              ) -> float:
    """Seconds of content a fixed byte buffer holds at a given rate."""
    return buffer_bytes * 8.0 / encoding_rate_bps
