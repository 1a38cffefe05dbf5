import random

import pytest

from oracles import quantize_events, step_wifi, wifi_energy
from streamsim import PacketEvent, WifiPsmConfig, simulate_wifi
from streamsim.radio import wifi_sleep_current


def _energy(tl):
    return sum(iv.current_ma * (iv.t_end_s - iv.t_start_s) for iv in tl.intervals)


def test_no_traffic_is_one_sleep_interval_with_beacon_blend(gs3):
    cfg = WifiPsmConfig(listen_interval_ms=100.0, tail_ms=200.0)
    tl = simulate_wifi([], cfg, gs3, session_end_s=10.0)
    assert len(tl.intervals) == 1
    iv = tl.intervals[0]
    assert iv.state == "sleep" and (iv.t_start_s, iv.t_end_s) == (0.0, 10.0)
    # 100 beacon wakes of 2 ms at idle-tail current over 10 s
    expected = (100 * 0.002 * gs3.wifi_idle_tail
                + (10.0 - 0.2) * gs3.wifi_sleep)
    assert _energy(tl) == pytest.approx(expected, rel=1e-9)


def test_single_packet_tail_then_sleep(gs3):
    cfg = WifiPsmConfig(tail_ms=200.0)
    tl = simulate_wifi([PacketEvent(1.0, 1500, 0)], cfg, gs3, session_end_s=10.0)
    states = [(iv.state, iv.t_start_s, iv.t_end_s) for iv in tl.intervals]
    assert states == [("sleep", 0.0, 1.0),
                      ("idle_tail", 1.0, 1.2),
                      ("sleep", 1.2, 10.0)]


def test_spaced_packets_sleep_equals_gap_minus_tail_sum(gs3):
    """Per-gap sleep is max(0, gap - tail); checked against the closed form
    and against the per-millisecond reference simulator."""
    cfg = WifiPsmConfig(tail_ms=200.0)
    events = [PacketEvent(float(t), 1500, 0) for t in range(10)]
    end = 10.0
    tl = simulate_wifi(events, cfg, gs3, session_end_s=end)
    gaps = [1.0] * 9 + [1.0]   # inner gaps plus trailing span to session end
    expected_sleep = sum(max(0.0, g - 0.2) for g in gaps)
    assert tl.residency().get("sleep", 0.0) == pytest.approx(expected_sleep)
    res = step_wifi(events, cfg, gs3, end)
    assert res["sleep"] == pytest.approx(expected_sleep, abs=0.002 * len(events))


def test_burst_merging_keeps_radio_active_between_close_packets(gs3):
    cfg = WifiPsmConfig(tail_ms=200.0)
    events = [PacketEvent(1.0 + 0.05 * k, 12500, 0) for k in range(100)]
    tl = simulate_wifi(events, cfg, gs3, session_end_s=10.0)
    res = tl.residency()
    assert res["active"] == pytest.approx(99 * 0.05, abs=1e-9)
    assert res["idle_tail"] == pytest.approx(0.2, abs=1e-9)


def test_sleep_disabled_keeps_idle_current(gs3):
    cfg = WifiPsmConfig(tail_ms=200.0, sleep_current_applies=False)
    tl = simulate_wifi([PacketEvent(1.0, 1500, 0)], cfg, gs3, session_end_s=5.0)
    assert all(iv.state in ("active", "idle_tail") for iv in tl.intervals)
    assert tl.intervals[-1].current_ma == gs3.wifi_idle_tail


def test_unsorted_events_rejected(gs3):
    events = [PacketEvent(2.0, 100, 0), PacketEvent(1.0, 100, 0)]
    with pytest.raises(ValueError, match="sorted"):
        simulate_wifi(events, WifiPsmConfig(), gs3, session_end_s=5.0)


def test_config_validation():
    with pytest.raises(ValueError):
        WifiPsmConfig(listen_interval_ms=0.0)
    with pytest.raises(ValueError):
        WifiPsmConfig(tail_ms=-1.0)


def test_coverage_and_oracle_agreement_random(gs3):
    rng = random.Random(11)
    for _ in range(40):
        end = rng.choice([3.0, 8.0, 15.0])
        t, events = 0.0, []
        while True:
            t += rng.choice([0.02, 0.1, 0.5, 2.0])
            if t >= end:
                break
            events.append(PacketEvent(round(t, 3), 1500, 0))
        events = quantize_events(events)
        cfg = WifiPsmConfig(tail_ms=rng.choice([50.0, 200.0]))
        tl = simulate_wifi(events, cfg, gs3, session_end_s=end)
        tl.validate(end)
        e_ref = wifi_energy(step_wifi(events, cfg, gs3, end), cfg, gs3)
        assert _energy(tl) == pytest.approx(e_ref, rel=1e-3)


def test_blended_sleep_current_value(gs3):
    cfg = WifiPsmConfig(listen_interval_ms=100.0)
    expected = (2.0 * gs3.wifi_idle_tail + 98.0 * gs3.wifi_sleep) / 100.0
    assert wifi_sleep_current(cfg, gs3) == pytest.approx(expected)
