"""Domain types shared by every engine module.

All times are seconds, positions are meters, angles are radians.
Coordinate convention: +z is listener-forward at yaw 0, +x is
listener-right, +y is up. Yaw rotates about the vertical axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

SAMPLE_RATE = 48000
OVERRUN_ALLOWANCE = 5.0  # seconds an event may run past scene end after time shift
SCHEMA_VERSION = 1


class SoundCategory(Enum):
    REAL_WORLD = "RealWorld"
    VIRTUAL = "Virtual"


class Ear(Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTH = "both"


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_finite(self) -> bool:
        return all(math.isfinite(c) for c in (self.x, self.y, self.z))


@dataclass(frozen=True)
class Spatial:
    position: Vec3


@dataclass(frozen=True)
class EarChannel:
    channel: Ear


Placement = Spatial | EarChannel


@dataclass
class AudioClip:
    """A mono or stereo asset at the engine sample rate.

    channels == 1: samples is one float array.
    channels == 2: samples is (left, right) of equal length.
    """

    id: str
    samples: np.ndarray | tuple[np.ndarray, np.ndarray]
    channels: int = 1
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self) -> None:
        if self.channels not in (1, 2):
            raise ValueError(f"clip {self.id!r}: channels must be 1 or 2")
        if self.sample_rate != SAMPLE_RATE:
            raise ValueError(
                f"clip {self.id!r}: sample_rate {self.sample_rate} != engine rate {SAMPLE_RATE}"
            )

    @property
    def n_samples(self) -> int:
        if self.channels == 1:
            return len(self.samples)
        return len(self.samples[0])

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate

    def mono(self) -> np.ndarray:
        """Downmix to mono for placement (stereo averages the channels)."""
        if self.channels == 1:
            return self.samples
        return 0.5 * (self.samples[0] + self.samples[1])


@dataclass(frozen=True)
class SoundSource:
    id: str
    clip: str
    category: SoundCategory
    placement: Placement
    identification_key: int | None = None
    protected: bool = False


@dataclass(frozen=True)
class SoundEvent:
    source: str
    scheduled_onset: float
    duration: float


@dataclass(frozen=True)
class Waypoint:
    time: float
    position: Vec3
    yaw: float


@dataclass(frozen=True)
class ListenerPath:
    waypoints: tuple[Waypoint, ...]

    def at(self, t: float) -> tuple[Vec3, float]:
        """Position and yaw at time t, linearly interpolated, held at the ends."""
        wps = self.waypoints
        if t <= wps[0].time:
            return wps[0].position, wps[0].yaw
        for a, b in zip(wps, wps[1:]):
            if t <= b.time:
                u = (t - a.time) / (b.time - a.time)
                pos = Vec3(
                    a.position.x + u * (b.position.x - a.position.x),
                    a.position.y + u * (b.position.y - a.position.y),
                    a.position.z + u * (b.position.z - a.position.z),
                )
                return pos, a.yaw + u * (b.yaw - a.yaw)
        return wps[-1].position, wps[-1].yaw


@dataclass(frozen=True)
class Scene:
    id: str
    duration: float
    seed: int
    sources: tuple[SoundSource, ...]
    ambient_beds: tuple[SoundEvent, ...]
    events: tuple[SoundEvent, ...]
    listener: ListenerPath

    def source_index(self) -> dict[str, SoundSource]:
        return {s.id: s for s in self.sources}


@dataclass(frozen=True)
class TransparencyParams:
    """Transparency level tau with the headphone-blocking model constants."""

    tau: float
    eta: float = 0.75
    s_default: float = 0.5
    z: float = 2000.0
    tau_automation: tuple[tuple[float, float], ...] | None = None

    def tau_at(self, t: float) -> float:
        """Step-interpolated tau: last automation point at or before t, else base."""
        value = self.tau
        if self.tau_automation:
            for time, tau in self.tau_automation:
                if time <= t:
                    value = tau
                else:
                    break
        return value


@dataclass(frozen=True)
class LowPass:
    cutoff: float


@dataclass(frozen=True)
class HighPass:
    cutoff: float


@dataclass(frozen=True)
class Telephone:
    low: float
    high: float


@dataclass(frozen=True)
class PitchScale:
    ratio: float


StyleFilter = LowPass | HighPass | Telephone | PitchScale


@dataclass(frozen=True)
class OnEvent:
    selector: str


@dataclass(frozen=True)
class OnProximity:
    source: str
    radius: float


Trigger = OnEvent | OnProximity


@dataclass(frozen=True)
class EarconAttachment:
    earcon_clip: str
    trigger: Trigger
    lead_time: float = 0.4


@dataclass(frozen=True)
class TimeShiftConfig:
    enabled: bool = False
    guard_gap: float = 0.0
    protected: tuple[str, ...] = ()


@dataclass(frozen=True)
class ManipulationPlan:
    """Declarative configuration of all six manipulators for one condition.

    Map keys are selectors: an exact source id, "key:N" for one of the four
    identification keys, or "category:RealWorld" / "category:Virtual".
    Exact id wins over key, key wins over category.
    """

    transparency: TransparencyParams
    envelope_ranks: dict[str, int] = field(default_factory=dict)
    envelope_rank_step_db: float = 3.0
    position_overrides: dict[str, Placement] = field(default_factory=dict)
    style_filters: dict[str, StyleFilter] = field(default_factory=dict)
    time_shift: TimeShiftConfig = field(default_factory=TimeShiftConfig)
    earcons: tuple[EarconAttachment, ...] = ()


@dataclass(frozen=True)
class TimelineEntry:
    event_id: str
    source: str
    identification_key: int | None
    category: SoundCategory
    scheduled_onset: float
    actual_onset: float
    duration: float
    applied_manipulations: tuple[str, ...] = ()
    dropped: bool = False


@dataclass(frozen=True)
class Timeline:
    entries: tuple[TimelineEntry, ...]

    def identifiable(self) -> tuple[TimelineEntry, ...]:
        """Entries that count toward scoring: keyed and not dropped."""
        return tuple(
            e for e in self.entries if e.identification_key is not None and not e.dropped
        )


def selector_matches(selector: str, source: SoundSource) -> bool:
    if selector.startswith("key:"):
        return source.identification_key == int(selector[4:])
    if selector.startswith("category:"):
        return source.category.value == selector[9:]
    return source.id == selector


def resolve_selector_map(mapping: dict[str, object], source: SoundSource) -> object | None:
    """Most specific match wins: exact id, then key:N, then category:X."""
    if source.id in mapping:
        return mapping[source.id]
    if source.identification_key is not None:
        key = f"key:{source.identification_key}"
        if key in mapping:
            return mapping[key]
    cat = f"category:{source.category.value}"
    if cat in mapping:
        return mapping[cat]
    return None


@dataclass(frozen=True)
class Violation:
    rule: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule} at {self.path}: {self.message}"


class SchemaError(ValueError):
    """Document does not match the published schema. Names the offending path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class InvariantError(ValueError):
    """A type invariant is violated. Carries the named rules."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


def _check(out: list[Violation], ok: bool, rule: str, path: str, message: str) -> None:
    if not ok:
        out.append(Violation(rule, path, message))


def validate_scene(scene: Scene) -> list[Violation]:
    """Every invariant as a named rule; empty list means valid."""
    out: list[Violation] = []
    _check(out, scene.duration > 0, "scene.duration-positive", "duration", "must be > 0")
    _check(out, 0 <= scene.seed < 2**64, "scene.seed-u64", "seed", "must fit in 64 bits unsigned")

    seen: set[str] = set()
    for i, src in enumerate(scene.sources):
        path = f"sources[{i}]"
        _check(out, src.id not in seen, "source.id-unique", path, f"duplicate id {src.id!r}")
        seen.add(src.id)
        if src.identification_key is not None:
            _check(
                out,
                src.identification_key in (1, 2, 3, 4),
                "source.key-range",
                path,
                f"identification_key {src.identification_key} not in 1..4",
            )
        if src.category is SoundCategory.REAL_WORLD:
            _check(
                out,
                isinstance(src.placement, Spatial),
                "source.realworld-spatial",
                path,
                "RealWorld sources must use Spatial placement",
            )
        if isinstance(src.placement, Spatial):
            _check(
                out,
                src.placement.position.is_finite(),
                "source.position-finite",
                path,
                "position components must be finite",
            )

    index = scene.source_index()

    def check_events(events: tuple[SoundEvent, ...], kind: str, identifiable: bool) -> None:
        for i, ev in enumerate(events):
            path = f"{kind}[{i}]"
            src = index.get(ev.source)
            _check(
                out,
                src is not None,
                "event.source-exists",
                path,
                f"references missing source {ev.source!r}",
            )
            if src is not None:
                has_key = src.identification_key is not None
                _check(
                    out,
                    has_key == identifiable,
                    "event.source-identifiable" if identifiable else "bed.source-ambient",
                    path,
                    "identifiable events must reference keyed sources"
                    if identifiable
                    else "ambient beds must reference key-less sources",
                )
            _check(out, ev.scheduled_onset >= 0, "event.onset-nonnegative", path, "onset < 0")
            _check(out, ev.duration > 0, "event.duration-positive", path, "duration <= 0")
            _check(
                out,
                ev.scheduled_onset + ev.duration <= scene.duration + 1e-9,
                "event.within-scene",
                path,
                f"ends at {ev.scheduled_onset + ev.duration:.3f}s, past scene end {scene.duration:.3f}s",
            )

    check_events(scene.events, "events", identifiable=True)
    check_events(scene.ambient_beds, "ambient_beds", identifiable=False)

    wps = scene.listener.waypoints
    _check(out, len(wps) >= 1, "listener.nonempty", "listener", "needs at least one waypoint")
    if wps:
        _check(out, wps[0].time == 0.0, "listener.starts-at-zero", "listener.waypoints[0]", "first waypoint must be at t=0")
        for i, (a, b) in enumerate(zip(wps, wps[1:])):
            _check(
                out,
                a.time < b.time,
                "listener.times-increasing",
                f"listener.waypoints[{i + 1}]",
                "waypoint times must strictly increase",
            )
    return out


def validate_plan(plan: ManipulationPlan) -> list[Violation]:
    out: list[Violation] = []
    tp = plan.transparency
    _check(out, 0.0 <= tp.tau <= 1.0, "transparency.tau-range", "transparency.tau", "tau must be in [0,1]")
    _check(out, 0.0 <= tp.eta <= 1.0, "transparency.eta-range", "transparency.eta", "eta must be in [0,1]")
    _check(
        out,
        0.0 < tp.s_default <= 1.0,
        "transparency.s-default-range",
        "transparency.s_default",
        "s_default must be in (0,1]",
    )
    _check(out, tp.z > 0, "transparency.z-positive", "transparency.z", "z must be > 0")
    if tp.tau_automation is not None:
        last = None
        for i, (t, tau) in enumerate(tp.tau_automation):
            path = f"transparency.tau_automation[{i}]"
            _check(out, 0.0 <= tau <= 1.0, "transparency.tau-range", path, "tau must be in [0,1]")
            _check(
                out,
                last is None or t >= last,
                "transparency.automation-ordered",
                path,
                "automation times must be non-decreasing",
            )
            last = t
    for sel, rank in plan.envelope_ranks.items():
        _check(
            out,
            isinstance(rank, int) and rank >= 1,
            "envelope.rank-positive",
            f"envelope_ranks[{sel!r}]",
            "ranks must be integers >= 1",
        )
    nyquist = SAMPLE_RATE / 2
    for sel, filt in plan.style_filters.items():
        path = f"style_filters[{sel!r}]"
        if isinstance(filt, (LowPass, HighPass)):
            _check(
                out,
                0 < filt.cutoff < nyquist,
                "style.cutoff-range",
                path,
                f"cutoff must be in (0, {nyquist})",
            )
        elif isinstance(filt, Telephone):
            _check(
                out,
                0 < filt.low < filt.high < nyquist,
                "style.telephone-band",
                path,
                "telephone needs 0 < low < high < nyquist",
            )
        elif isinstance(filt, PitchScale):
            _check(out, filt.ratio > 0, "style.pitch-ratio-positive", path, "ratio must be > 0")
    _check(
        out,
        plan.time_shift.guard_gap >= 0,
        "time-shift.guard-nonnegative",
        "time_shift.guard_gap",
        "guard_gap must be >= 0",
    )
    for i, att in enumerate(plan.earcons):
        path = f"earcons[{i}]"
        _check(out, att.lead_time >= 0, "earcon.lead-nonnegative", path, "lead_time must be >= 0")
        if isinstance(att.trigger, OnProximity):
            _check(out, att.trigger.radius > 0, "earcon.radius-positive", path, "radius must be > 0")
    return out


def validate_timeline(timeline: Timeline, scene_duration: float | None = None) -> list[Violation]:
    out: list[Violation] = []
    last_actual = None
    for i, e in enumerate(timeline.entries):
        path = f"entries[{i}]"
        _check(
            out,
            e.actual_onset >= e.scheduled_onset - 1e-9,
            "timeline.no-advance",
            path,
            f"actual onset {e.actual_onset:.3f} precedes scheduled {e.scheduled_onset:.3f}",
        )
        _check(
            out,
            last_actual is None or e.actual_onset >= last_actual - 1e-9,
            "timeline.sorted",
            path,
            "entries must be sorted by actual onset",
        )
        last_actual = e.actual_onset
        if e.identification_key is not None:
            _check(out, e.identification_key in (1, 2, 3, 4), "timeline.key-range", path, "key not in 1..4")
        if scene_duration is not None and not e.dropped:
            _check(
                out,
                e.actual_onset + e.duration <= scene_duration + OVERRUN_ALLOWANCE + 1e-9,
                "timeline.within-overrun",
                path,
                "non-dropped entry ends past scene duration + overrun allowance",
            )
    return out
