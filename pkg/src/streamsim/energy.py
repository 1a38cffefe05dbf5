"""Energy accounting: average currents, Joules and the session summary."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .delivery import DeliveryLog
from .playback import QoeReport
from .profiles import PowerProfile
from .radio import RadioTimeline


def integrate_energy(timeline: RadioTimeline, profile: PowerProfile,
                     wall_time_s: float) -> tuple[float, float]:
    """Average radio current (mA) and radio energy (J) over the session.

    The timeline must cover [0, wall_time_s] exactly; a coverage gap is a
    modelling error and is rejected.
    """
    timeline.validate(wall_time_s)
    if wall_time_s <= 0:
        return 0.0, 0.0
    charge = sum(iv.current_ma * (iv.t_end_s - iv.t_start_s)
                 for iv in timeline.intervals)   # mA * s
    avg_ma = charge / wall_time_s
    energy_j = (charge / 1000.0) * profile.nominal_voltage_v
    return avg_ma, energy_j


@dataclass
class SessionSummary:
    """Flat session metrics; the JSON field names are a stable interface."""
    joining_time_s: float
    stall_total_s: float
    stall_count: int
    bytes_downloaded: float
    bytes_consumed: float
    bytes_wasted: float
    avg_streaming_current_ma: float
    avg_playback_current_ma: float
    avg_total_current_ma: float
    energy_j: float
    wall_time_s: float
    state_residency: dict[str, float] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "joining_time_s": self.joining_time_s,
            "stall_total_s": self.stall_total_s,
            "stall_count": self.stall_count,
            "bytes_downloaded": self.bytes_downloaded,
            "bytes_consumed": self.bytes_consumed,
            "bytes_wasted": self.bytes_wasted,
            "avg_streaming_current_mA": self.avg_streaming_current_ma,
            "avg_playback_current_mA": self.avg_playback_current_ma,
            "avg_total_current_mA": self.avg_total_current_ma,
            "energy_J": self.energy_j,
            "wall_time_s": self.wall_time_s,
            "state_residency": self.state_residency,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def summarize(dlog: DeliveryLog, qoe: QoeReport, radio: RadioTimeline,
              profile: PowerProfile, wall_time_s: float) -> SessionSummary:
    """Fuse the per-module artifacts of one scenario into a SessionSummary.

    Cross-module byte conservation is re-checked here and a mismatch is a
    hard failure: it means two modules disagree about the same session.
    """
    delivered = dlog.bytes_delivered
    accounted = dlog.bytes_consumed + dlog.bytes_buffered_end + dlog.bytes_wasted
    if delivered > 0 and abs(delivered - accounted) > max(2.0, 1e-6 * delivered):
        raise AssertionError(
            f"byte conservation breach: delivered={delivered:.1f}, "
            f"accounted={accounted:.1f}")

    avg_stream_ma, _ = integrate_energy(radio, profile, wall_time_s)
    # The display is lit from the request on, so the playback constant
    # applies to the whole wall time, not just the post-join span.
    avg_playback_ma = profile.playback_ma if wall_time_s > 0 else 0.0
    avg_total_ma = avg_stream_ma + avg_playback_ma
    energy_j = (avg_total_ma / 1000.0) * profile.nominal_voltage_v * wall_time_s

    residency = radio.residency()
    span = sum(residency.values())
    if wall_time_s > 0 and abs(span - wall_time_s) > 1e-6 * max(wall_time_s, 1.0):
        raise AssertionError(
            f"residency covers {span:.6f}s of a {wall_time_s:.6f}s session")

    return SessionSummary(
        joining_time_s=qoe.joining_time_s,
        stall_total_s=qoe.stall_total_s,
        stall_count=len(qoe.stall_events),
        bytes_downloaded=delivered,
        bytes_consumed=dlog.bytes_consumed,
        bytes_wasted=dlog.bytes_wasted,
        avg_streaming_current_ma=avg_stream_ma,
        avg_playback_current_ma=avg_playback_ma,
        avg_total_current_ma=avg_total_ma,
        energy_j=energy_j,
        wall_time_s=wall_time_s,
        state_residency=residency,
    )
