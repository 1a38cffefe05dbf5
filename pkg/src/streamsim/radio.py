"""Radio power-state machines for Wi-Fi PSM, WCDMA/HSPA RRC and LTE cDRX.

Each simulator maps a sorted packet-event timeline onto a contiguous list of
radio-state intervals with a per-state current draw taken from a device
PowerProfile.  The machines model:

  Wi-Fi  - adaptive PSM: active during packet bursts, an idle tail after the
           last packet of a burst, then sleep with periodic beacon wake-ups
           (folded into the sleep current as a duty-cycle blend).
  HSPA   - CELL_DCH / CELL_FACH / CELL_PCH / IDLE with inactivity timers,
           optional fast dormancy, and a promotion delay charged at the
           destination-state current before the first byte of a burst.
  LTE    - continuous reception, connected-mode DRX cycling (on-period /
           sleep per cycle) and RRC idle, with a short promotion delay.

All functions are pure: they never mutate their inputs and are safe to run
concurrently.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .profiles import PowerProfile
from .streams import PacketEvent

log = logging.getLogger(__name__)

# Default promotion latencies in seconds per access technology.
PROMOTION_LATENCY_S = {"wifi": 0.0, "hspa": 2.0, "lte": 0.12}

# Packets below this size can be served in CELL_FACH without a DCH promotion.
FACH_MAX_BYTES = 1024

# Wake duration charged per Wi-Fi listen interval for the TIM beacon.
BEACON_WAKE_MS = 2.0

_EPS = 1e-9


def promotion_latency(technology: str) -> float:
    """Promotion latency in seconds for 'wifi', 'hspa' or 'lte'."""
    try:
        return PROMOTION_LATENCY_S[technology]
    except KeyError:
        raise ValueError(f"unknown radio technology: {technology!r}") from None


@dataclass(frozen=True)
class WifiPsmConfig:
    """Adaptive power-save parameters for an 802.11 interface."""
    listen_interval_ms: float = 100.0   # TIM beacon period
    tail_ms: float = 200.0              # idle hold after the last packet
    sleep_current_applies: bool = True  # False: interface never sleeps

    def __post_init__(self):
        if self.listen_interval_ms <= 0:
            raise ValueError("listen_interval_ms must be > 0")
        if self.tail_ms < 0:
            raise ValueError("tail_ms must be >= 0")


@dataclass(frozen=True)
class HspaRrcConfig:
    """RRC inactivity timers and fast-dormancy settings for HSPA."""
    t1_s: float = 8.0                   # DCH -> FACH inactivity
    t2_s: float = 3.0                   # FACH -> PCH inactivity
    t3_s: float = 1740.0                # PCH -> IDLE inactivity
    fd_timer_s: Optional[float] = 5.0   # fast-dormancy inactivity, None = off
    fd_target: str = "idle"             # "pch" (network FD) or "idle" (RRC release)
    promotion_latency_s: float = 2.0    # IDLE/PCH -> DCH
    fach_max_bytes: int = FACH_MAX_BYTES

    def __post_init__(self):
        for name in ("t1_s", "t2_s", "t3_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.fd_timer_s is not None and self.fd_timer_s > self.t1_s:
            raise ValueError("fd_timer_s must not exceed t1_s")
        if self.promotion_latency_s < 0:
            raise ValueError("promotion_latency_s must be >= 0")
        if self.fd_target not in ("pch", "idle"):
            raise ValueError("fd_target must be 'pch' or 'idle'")


@dataclass(frozen=True)
class LteDrxConfig:
    """Connected-mode DRX and RRC idle settings for LTE."""
    rrc_idle_s: float = 10.0            # connected -> idle inactivity
    drx_inactivity_ms: float = 100.0    # continuous rx -> DRX cycling
    drx_cycle_ms: float = 80.0
    drx_on_ms: float = 10.0
    promotion_latency_ms: float = 120.0  # IDLE -> CONNECTED
    drx_enabled: bool = True

    def __post_init__(self):
        if self.rrc_idle_s <= 0:
            raise ValueError("rrc_idle_s must be > 0")
        if not 20.0 <= self.drx_cycle_ms <= 5000.0:
            raise ValueError("drx_cycle_ms must lie in [20, 5000] ms")
        if self.drx_on_ms >= self.drx_cycle_ms:
            raise ValueError("drx_on_ms must be < drx_cycle_ms")
        if self.drx_inactivity_ms < 0 or self.promotion_latency_ms < 0:
            raise ValueError("DRX timers must be >= 0")


@dataclass(frozen=True)
class RadioInterval:
    state: str
    t_start_s: float
    t_end_s: float
    current_ma: float


@dataclass
class RadioTimeline:
    """Contiguous, non-overlapping radio-state intervals covering a session."""
    technology: str
    intervals: list[RadioInterval] = field(default_factory=list)

    @property
    def end_s(self) -> float:
        return self.intervals[-1].t_end_s if self.intervals else 0.0

    def residency(self) -> dict[str, float]:
        """Seconds spent per state label."""
        out: dict[str, float] = {}
        for iv in self.intervals:
            out[iv.state] = out.get(iv.state, 0.0) + (iv.t_end_s - iv.t_start_s)
        return out

    def validate(self, session_end_s: Optional[float] = None) -> None:
        """Assert the coverage invariant: no gaps, no overlaps, full span."""
        prev = 0.0
        for iv in self.intervals:
            if iv.t_end_s < iv.t_start_s - _EPS:
                raise AssertionError(f"negative interval {iv}")
            if abs(iv.t_start_s - prev) > 1e-6:
                raise AssertionError(f"coverage gap at t={prev:.6f} before {iv}")
            prev = iv.t_end_s
        if session_end_s is not None:
            want = 0.0 if not self.intervals else session_end_s
            if abs(prev - want) > 1e-6:
                raise AssertionError(
                    f"timeline ends at {prev:.6f}, session ends at {want:.6f}")

    def to_csv_rows(self) -> list[tuple]:
        return [(iv.t_start_s, iv.t_end_s, iv.state, iv.current_ma)
                for iv in self.intervals]


def _check_events(events: Iterable[PacketEvent]) -> list[PacketEvent]:
    evs = list(events)
    prev = 0.0
    for i, ev in enumerate(evs):
        if ev.t_s < 0:
            raise ValueError(f"event {i} has negative time {ev.t_s}")
        if ev.t_s < prev - _EPS:
            raise ValueError(
                f"events not sorted: event {i} at t={ev.t_s} after t={prev}")
        prev = ev.t_s
    return evs


class _Builder:
    """Accumulates (state, current) spans and merges adjacent equal ones."""

    def __init__(self, technology: str):
        self.timeline = RadioTimeline(technology)
        self._t = 0.0

    @property
    def t(self) -> float:
        return self._t

    def push(self, state: str, t_end: float, current_ma: float) -> None:
        if t_end <= self._t + _EPS:
            self._t = max(self._t, t_end)
            return
        ivs = self.timeline.intervals
        if ivs and ivs[-1].state == state and ivs[-1].current_ma == current_ma:
            ivs[-1] = RadioInterval(state, ivs[-1].t_start_s, t_end, current_ma)
        else:
            ivs.append(RadioInterval(state, self._t, t_end, current_ma))
        self._t = t_end


# --------------------------------------------------------------------------
# Wi-Fi PSM
# --------------------------------------------------------------------------

def wifi_sleep_current(cfg: WifiPsmConfig, profile: PowerProfile) -> float:
    """Sleep-state current including the TIM beacon wake duty cycle."""
    duty = min(1.0, BEACON_WAKE_MS / cfg.listen_interval_ms)
    return duty * profile.wifi_idle_tail + (1.0 - duty) * profile.wifi_sleep


def simulate_wifi(events: Iterable[PacketEvent], cfg: WifiPsmConfig,
                  profile: PowerProfile,
                  session_end_s: Optional[float] = None) -> RadioTimeline:
    """Map packet events onto Wi-Fi PSM states.

    Packets separated by at most tail_ms belong to the same burst and the
    interface stays active across the gap; after the last packet of a burst
    it holds the idle tail for tail_ms and then sleeps, waking every listen
    interval for the beacon (charged as a blended sleep current).
    """
    evs = _check_events(events)
    end = session_end_s if session_end_s is not None else (evs[-1].t_s if evs else 0.0)
    if evs and evs[-1].t_s > end + _EPS:
        raise ValueError("events extend past session_end_s")

    tail_s = cfg.tail_ms / 1000.0
    sleep_ma = wifi_sleep_current(cfg, profile)
    sleep_state = "sleep" if cfg.sleep_current_applies else "idle_tail"
    if not cfg.sleep_current_applies:
        sleep_ma = profile.wifi_idle_tail

    b = _Builder("wifi")
    i = 0
    n = len(evs)
    while i < n:
        # burst: consecutive events with gaps <= tail
        j = i
        while j + 1 < n and evs[j + 1].t_s - evs[j].t_s <= tail_s + _EPS:
            j += 1
        b.push(sleep_state, min(evs[i].t_s, end), sleep_ma)
        b.push("active", min(evs[j].t_s, end), profile.wifi_active)
        b.push("idle_tail", min(evs[j].t_s + tail_s, end), profile.wifi_idle_tail)
        i = j + 1
    b.push(sleep_state, end, sleep_ma)
    b.timeline.validate(end)
    return b.timeline


# --------------------------------------------------------------------------
# WCDMA/HSPA RRC
# --------------------------------------------------------------------------

def _hspa_currents(profile: PowerProfile) -> dict[str, float]:
    return {"dch": profile.hspa_dch, "fach": profile.hspa_fach,
            "pch": profile.hspa_pch, "idle": profile.hspa_idle}


def _hspa_chain(cfg: HspaRrcConfig, from_state: str) -> list[tuple[str, float]]:
    """Demotion chain from an active state: [(state, dwell_s), ...] ending
    with the terminal state at dwell = inf."""
    inf = float("inf")
    if from_state == "dch":
        if cfg.fd_timer_s is not None:
            if cfg.fd_target == "idle":
                return [("dch", cfg.fd_timer_s), ("idle", inf)]
            return [("dch", cfg.fd_timer_s), ("pch", cfg.t3_s), ("idle", inf)]
        return [("dch", cfg.t1_s), ("fach", cfg.t2_s), ("pch", cfg.t3_s),
                ("idle", inf)]
    if from_state == "fach":
        return [("fach", cfg.t2_s), ("pch", cfg.t3_s), ("idle", inf)]
    raise ValueError(from_state)


def _chain_state_at(chain: list[tuple[str, float]], tau: float) -> str:
    off = 0.0
    for state, dwell in chain:
        off += dwell
        if tau < off:
            return state
    return chain[-1][0]


def simulate_hspa(events: Iterable[PacketEvent], cfg: HspaRrcConfig,
                  profile: PowerProfile,
                  session_end_s: Optional[float] = None) -> RadioTimeline:
    """Map packet events onto HSPA RRC states.

    Transfers run in CELL_DCH.  After inactivity the radio demotes through
    the configured timer chain; fast dormancy, when enabled, wins over T1.
    A packet arriving in CELL_PCH or IDLE promotes to CELL_DCH, charging
    promotion_latency_s at DCH current before the packet time.  Packets
    smaller than fach_max_bytes that arrive while in CELL_FACH are served
    there without promotion.
    """
    evs = _check_events(events)
    end = session_end_s if session_end_s is not None else (evs[-1].t_s if evs else 0.0)
    if evs and evs[-1].t_s > end + _EPS:
        raise ValueError("events extend past session_end_s")
    if cfg.fd_timer_s is not None and cfg.fd_target == "idle":
        log.debug("fast dormancy targets IDLE; T3 never applies")

    cur = _hspa_currents(profile)
    b = _Builder("hspa")
    state = "idle"           # radio state carried into the next gap
    gap_start = 0.0          # time the current inactivity period began

    def carve_gap(t_from: float, t_to: float, chain, promote_at: Optional[float]):
        """Fill [t_from, t_to] from the demotion chain, replacing the final
        promotion window (if any) with DCH."""
        lo = t_from
        cut = t_to if promote_at is None else promote_at
        off = t_from
        for st, dwell in chain:
            hi = min(cut, off + dwell)
            if hi > lo:
                b.push(st, hi, cur[st])
                lo = hi
            off += dwell
            if off >= cut:
                break
        if promote_at is not None and t_to > promote_at:
            b.push("dch", t_to, cur["dch"])

    chain: list[tuple[str, float]] = [("idle", float("inf"))]
    for ev in evs:
        t = min(ev.t_s, end)
        tau = t - gap_start
        before = _chain_state_at(chain, tau)
        promote_at = None
        if before in ("pch", "idle"):
            # time the chain enters its first low state within this gap
            low_entry = gap_start
            off = 0.0
            for st, dwell in chain:
                if st in ("pch", "idle"):
                    low_entry = gap_start + off
                    break
                off += dwell
            promote_at = max(t - cfg.promotion_latency_s, low_entry, b.t)
            after = "dch"
        elif before == "fach":
            after = "fach" if ev.bytes < cfg.fach_max_bytes else "dch"
        else:
            after = "dch"
        carve_gap(b.t, t, chain, promote_at)
        state = after
        gap_start = t
        chain = _hspa_chain(cfg, state)
    if evs:
        carve_gap(b.t, end, chain, None)
    else:
        b.push("idle", end, cur["idle"])
    b.timeline.validate(end)
    return b.timeline


# --------------------------------------------------------------------------
# LTE connected-mode DRX
# --------------------------------------------------------------------------

def simulate_lte(events: Iterable[PacketEvent], cfg: LteDrxConfig,
                 profile: PowerProfile,
                 session_end_s: Optional[float] = None) -> RadioTimeline:
    """Map packet events onto LTE states.

    After a transfer the radio stays in continuous reception for the DRX
    inactivity time, then cycles (on-period, sleep) until the RRC idle timer
    releases the connection.  The device-specific on-period residency comes
    from profile.drx_on_overstay_ms, which may exceed the configured
    drx_on_ms.  A packet arriving in IDLE charges the promotion latency at
    the reception current before the packet time.
    """
    evs = _check_events(events)
    end = session_end_s if session_end_s is not None else (evs[-1].t_s if evs else 0.0)
    if evs and evs[-1].t_s > end + _EPS:
        raise ValueError("events extend past session_end_s")

    inact = cfg.drx_inactivity_ms / 1000.0
    cycle = cfg.drx_cycle_ms / 1000.0
    on_s = min(profile.drx_on_overstay_ms, cfg.drx_cycle_ms) / 1000.0
    promo = cfg.promotion_latency_ms / 1000.0
    b = _Builder("lte")

    def carve_gap(t_from: float, t_to: float, rx_from: float,
                  promote_at: Optional[float]):
        """Fill [t_from, t_to] given continuous rx anchored at rx_from."""
        cut = t_to if promote_at is None else promote_at
        idle_at = rx_from + cfg.rrc_idle_s
        b.push("rx", min(cut, rx_from + inact), profile.lte_rx)
        if not cfg.drx_enabled:
            b.push("rx", min(cut, idle_at), profile.lte_rx)
        else:
            k = 0
            anchor = rx_from + inact
            while b.t + _EPS < min(cut, idle_at):
                c0 = anchor + k * cycle
                b.push("drx_on", min(cut, idle_at, c0 + on_s), profile.lte_drx_on)
                b.push("drx_sleep", min(cut, idle_at, c0 + cycle),
                       profile.lte_drx_sleep)
                k += 1
        b.push("idle", cut, profile.lte_idle)
        if promote_at is not None and t_to > promote_at:
            b.push("rx", t_to, profile.lte_rx)

    last = None
    for ev in evs:
        t = min(ev.t_s, end)
        if last is None:
            promote_at = max(t - promo, 0.0)
            b.push("idle", promote_at, profile.lte_idle)
            b.push("rx", t, profile.lte_rx)
        else:
            tau = t - last
            promote_at = None
            if tau >= cfg.rrc_idle_s:
                promote_at = max(t - promo, last + cfg.rrc_idle_s, b.t)
            carve_gap(b.t, t, last, promote_at)
        last = t
    if last is not None:
        carve_gap(b.t, end, last, None)
    else:
        b.push("idle", end, profile.lte_idle)
    b.timeline.validate(end)
    return b.timeline


def simulate_radio(technology: str, events: Iterable[PacketEvent], cfg,
                   profile: PowerProfile,
                   session_end_s: Optional[float] = None) -> RadioTimeline:
    """Dispatch to the per-technology simulator."""
    if technology == "wifi":
        return simulate_wifi(events, cfg, profile, session_end_s)
    if technology == "hspa":
        return simulate_hspa(events, cfg, profile, session_end_s)
    if technology == "lte":
        return simulate_lte(events, cfg, profile, session_end_s)
    raise ValueError(f"unknown radio technology: {technology!r}")
