"""streamsim: a deterministic mobile video streaming simulator.

Co-simulates server delivery techniques, the client playback buffer and
per-technology radio power-state machines, then reports QoE metrics
(joining time, stalls, data waste) and energy metrics (average streaming
current, Joules) per session, plus tradeoff sweeps across abandonment
points and dynamic buffer sizes.
"""

from .analysis import (SweepPoint, SweepResult, abandonment_sweep,
                       buffer_size_sweep, equivalent_buffer_seconds,
                       recommend_thresholds)
from .delivery import (DeliveryLog, EVENT_TICK_S, simulate_multi_connection_waste,
                       simulate_session)
from .energy import SessionSummary, integrate_energy, summarize
from .playback import (BufferTimeline, QoeReport, compute_buffer,
                       detect_stalls, joining_time)
from .profiles import BUILTIN_PROFILES, PowerProfile, get_profile
from .radio import (HspaRrcConfig, LteDrxConfig, RadioInterval, RadioTimeline,
                    WifiPsmConfig, promotion_latency, simulate_hspa,
                    simulate_lte, simulate_radio, simulate_wifi)
from .scenario import (ConfigError, Scenario, default_radio_config,
                       load_scenario, parse_scenario_text)
from .session import SessionResult, run_session
from .streams import LinkModel, PacketEvent, StreamSpec
from .techniques import (EncodingRate, FastCaching, Hls, Mss, OnOffM, OnOffS,
                         Technique, Throttling, preset, technique_kind)
from .traces import Classification, FlowRecord, classify, estimate_buffer, ingest

__version__ = "0.1.0"
