"""Scenario generation and the time-shift manipulation.

Three built-in scenario templates produce complete scenes from a seed:

* rw-focused: a guided walk down a sidewalk. Cane taps every half second,
  manhole covers change the tap sound for four taps, drills run at two
  work sites, a navigation voice and a ringtone play in the headphones,
  cars pass on the listener's left.
* vr-focused: seated virtual session. A handbook voice reads sentences
  with one-second pauses, voice notes arrive, someone knocks on the real
  door, cabin announcements play overhead.
* fully-mixed: a bar table. Real friends and remote friends take speaking
  turns that overlap, dishes clink, broadcast snippets play.

Identifiable events of the same key are always separated by at least
MIN_SAME_KEY_GAP of silence between one ending and the next starting.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .model import (
    OVERRUN_ALLOWANCE,
    Ear,
    EarChannel,
    ListenerPath,
    ManipulationPlan,
    Scene,
    SoundCategory,
    SoundEvent,
    SoundSource,
    Spatial,
    Vec3,
    Waypoint,
    selector_matches,
)

MIN_SAME_KEY_GAP = 1.0
TAP_SLOT = 0.5
WALK_SPEED = 1.2
MAX_EXTEND = 5.0

TEMPLATE_NAMES = ("rw-focused", "vr-focused", "fully-mixed")


@dataclass(frozen=True)
class ScenarioTemplate:
    name: str
    duration: float = 90.0


def _train_onsets(
    rng: np.random.Generator, count: int, duration: float, t0: float, t1: float
) -> np.ndarray:
    """Random onsets for `count` events of `duration` inside [t0, t1] such
    that consecutive onsets are at least duration + MIN_SAME_KEY_GAP apart."""
    block = duration + MIN_SAME_KEY_GAP
    slack = (t1 - t0) - count * block
    if slack < 0:
        raise ValueError(
            f"cannot place {count} events of {duration}s in [{t0}, {t1}] "
            f"with {MIN_SAME_KEY_GAP}s gaps"
        )
    offsets = np.sort(rng.uniform(0.0, slack, size=count))
    return t0 + offsets + np.arange(count) * block


def _grid_group_starts(
    rng: np.random.Generator, count: int, width: int, spacing: int, lead: int, total: int
) -> list[int]:
    """Slot indices for `count` groups of `width` slots, starts at least
    `spacing` slots apart, first at or after `lead`, all inside `total`."""
    headroom = total - width - lead - (count - 1) * spacing
    if headroom < 0:
        raise ValueError(
            f"cannot place {count} groups of {width} slots in {total} slots"
        )
    h = np.sort(rng.integers(0, headroom + 1, size=count))
    return [lead + int(h[i]) + i * spacing for i in range(count)]


def _round2(x: float) -> float:
    # plain float regardless of numpy scalar inputs
    return float(round(x, 6))


def _extendable(build, base_duration: float):
    """Try the builder at the base duration, stretching up to MAX_EXTEND
    before giving up."""
    last_err = None
    for extra in (0.0, MAX_EXTEND):
        try:
            return build(base_duration + extra)
        except ValueError as err:
            last_err = err
    raise ValueError(f"scenario does not fit even extended by {MAX_EXTEND}s: {last_err}")


# ------------------------------------------------------------ rw-focused


def _build_rw_focused(seed: int, duration: float, rng: np.random.Generator) -> Scene:
    slots = int(math.floor(duration / TAP_SLOT))
    group_width = 4  # four taps on the manhole
    group_spacing = 6  # width + two empty slots keeps the 1s same-key gap
    starts = _grid_group_starts(rng, 5, group_width, group_spacing, lead=4, total=slots)

    walk_len = WALK_SPEED * duration
    path = ListenerPath(
        (
            Waypoint(0.0, Vec3(0.0, 0.0, 0.0), 0.0),
            Waypoint(duration, Vec3(0.0, 0.0, walk_len), 0.0),
        )
    )

    def walk_z(t: float) -> float:
        return WALK_SPEED * t

    sources: list[SoundSource] = []
    events: list[SoundEvent] = []
    beds: list[SoundEvent] = []

    # Manhole groups: one keyed event per cover, four tiled taps each.
    for i, g in enumerate(starts):
        onset = g * TAP_SLOT
        sid = f"manhole_{i}"
        sources.append(
            SoundSource(
                id=sid,
                clip="tap_on_manhole@2.0",
                category=SoundCategory.REAL_WORLD,
                placement=Spatial(Vec3(0.3, -1.2, _round2(walk_z(onset + 1.0)))),
                identification_key=1,
            )
        )
        events.append(SoundEvent(sid, _round2(onset), 2.0))

    # Cane taps fill every other slot; chunked so each chunk's source sits
    # where the listener is while it plays.
    occupied = set()
    for g in starts:
        occupied.update(range(g, g + group_width))
    free_runs: list[tuple[int, int]] = []
    run_start = None
    for s in range(slots):
        if s in occupied:
            if run_start is not None:
                free_runs.append((run_start, s))
                run_start = None
        elif run_start is None:
            run_start = s
    if run_start is not None:
        free_runs.append((run_start, slots))
    seg = 0
    for a, b in free_runs:
        s = a
        while s < b:
            width = min(6, b - s)
            onset = s * TAP_SLOT
            dur = width * TAP_SLOT
            sid = f"cane_{seg:02d}"
            sources.append(
                SoundSource(
                    id=sid,
                    clip=f"tap@{dur}",
                    category=SoundCategory.REAL_WORLD,
                    placement=Spatial(Vec3(0.2, -1.2, _round2(walk_z(onset + dur / 2)))),
                )
            )
            beds.append(SoundEvent(sid, _round2(onset), _round2(dur)))
            seg += 1
            s += width

    # Two drill sites within earshot of the path; five drill bursts total.
    site_a = Vec3(_round2(rng.uniform(3.0, 8.0)), 0.0, _round2(rng.uniform(20.0, 40.0)))
    site_b = Vec3(_round2(-rng.uniform(3.0, 8.0)), 0.0, _round2(rng.uniform(60.0, 85.0)))
    sources.append(
        SoundSource("drill_a", "drill@2.0", SoundCategory.REAL_WORLD, Spatial(site_a), 2)
    )
    sources.append(
        SoundSource("drill_b", "drill@2.0", SoundCategory.REAL_WORLD, Spatial(site_b), 2)
    )
    drill_onsets = _train_onsets(rng, 5, 2.0, 2.0, duration - 0.5)
    for i, onset in enumerate(drill_onsets):
        events.append(SoundEvent("drill_a" if i < 3 else "drill_b", _round2(onset), 2.0))

    # Headphone lanes: navigation prompts and a ringtone.
    sources.append(
        SoundSource(
            "nav_voice", "speech@2.5", SoundCategory.VIRTUAL, EarChannel(Ear.BOTH), 3
        )
    )
    for onset in _train_onsets(rng, 5, 2.5, 2.0, duration - 0.5):
        events.append(SoundEvent("nav_voice", _round2(onset), 2.5))
    sources.append(
        SoundSource(
            "phone_ring", "ringtone@1.5", SoundCategory.VIRTUAL, EarChannel(Ear.BOTH), 4
        )
    )
    for onset in _train_onsets(rng, 5, 1.5, 2.0, duration - 0.5):
        events.append(SoundEvent("phone_ring", _round2(onset), 1.5))

    # Traffic on the left side of the walk.
    car_onsets = np.sort(rng.uniform(1.0, duration - 2.5, size=6))
    for i, onset in enumerate(car_onsets):
        sid = f"car_{i}"
        x = _round2(-rng.uniform(3.0, 6.0))
        z = _round2(walk_z(onset + 1.0) + rng.uniform(-4.0, 4.0))
        sources.append(
            SoundSource(sid, "car_pass@2.0", SoundCategory.REAL_WORLD, Spatial(Vec3(x, 0.0, z)))
        )
        beds.append(SoundEvent(sid, _round2(onset), 2.0))

    return _assemble("rw-focused", seed, duration, sources, beds, events, path)


# ------------------------------------------------------------ vr-focused


def _build_vr_focused(seed: int, duration: float, rng: np.random.Generator) -> Scene:
    path = ListenerPath((Waypoint(0.0, Vec3(0.0, 0.0, 0.0), 0.0),))
    sources: list[SoundSource] = []
    events: list[SoundEvent] = []
    beds: list[SoundEvent] = []

    # Handbook voice reads five sentences with exactly one second between.
    sentence = 3.0
    pause = 1.0
    block = 5 * sentence + 4 * pause
    t1 = duration - 0.5 - block
    if t1 < 2.0:
        raise ValueError(f"handbook block of {block}s does not fit in {duration}s")
    base = rng.uniform(2.0, t1)
    sources.append(
        SoundSource("handbook", "speech@3.0", SoundCategory.VIRTUAL, EarChannel(Ear.BOTH), 1)
    )
    for i in range(5):
        events.append(SoundEvent("handbook", _round2(base + i * (sentence + pause)), sentence))

    sources.append(
        SoundSource("voice_note", "speech@2.0", SoundCategory.VIRTUAL, EarChannel(Ear.BOTH), 2)
    )
    for onset in _train_onsets(rng, 5, 2.0, 2.0, duration - 0.5):
        events.append(SoundEvent("voice_note", _round2(onset), 2.0))

    sources.append(
        SoundSource(
            "door_knock",
            "knock@0.6",
            SoundCategory.REAL_WORLD,
            Spatial(Vec3(2.5, 0.0, -1.0)),
            3,
        )
    )
    for onset in _train_onsets(rng, 5, 0.6, 2.0, duration - 0.5):
        events.append(SoundEvent("door_knock", _round2(onset), 0.6))

    sources.append(
        SoundSource(
            "cabin_pa",
            "broadcast@3.0",
            SoundCategory.REAL_WORLD,
            Spatial(Vec3(0.0, 2.0, 1.5)),
            4,
        )
    )
    for onset in _train_onsets(rng, 5, 3.0, 2.0, duration - 0.5):
        events.append(SoundEvent("cabin_pa", _round2(onset), 3.0))

    # Low cabin murmur behind everything.
    sources.append(
        SoundSource(
            "cabin_murmur", "crowd_bed@15.0", SoundCategory.REAL_WORLD, Spatial(Vec3(0.0, 1.5, 2.0))
        )
    )
    t = 0.0
    while t + 15.0 <= duration + 1e-9:
        beds.append(SoundEvent("cabin_murmur", _round2(t), 15.0))
        t += 15.0

    return _assemble("vr-focused", seed, duration, sources, beds, events, path)


# ------------------------------------------------------------ fully-mixed


def _build_fully_mixed(seed: int, duration: float, rng: np.random.Generator) -> Scene:
    path = ListenerPath((Waypoint(0.0, Vec3(0.0, 0.0, 0.0), 0.0),))
    sources: list[SoundSource] = []
    events: list[SoundEvent] = []
    beds: list[SoundEvent] = []

    turn = 3.0
    overlap_shift = 1.5  # follower starts halfway through the leader's turn
    pair_span = turn + overlap_shift

    friend_positions = (Vec3(1.2, 0.0, 0.8), Vec3(-1.2, 0.0, 0.8))
    for i, pos in enumerate(friend_positions):
        sources.append(
            SoundSource(
                f"friend_{i}",
                f"speech@{turn}#f{i}",
                SoundCategory.REAL_WORLD,
                Spatial(pos),
                1,
            )
        )
    sources.append(
        SoundSource("remote_voice", f"speech@{turn}#r", SoundCategory.VIRTUAL, EarChannel(Ear.BOTH), 2)
    )

    # Six pairs of one real and one remote turn; within each pair the
    # follower starts halfway through the leader so every turn overlaps
    # a turn of the other kind by half its length.
    pair_starts = _train_onsets(rng, 6, pair_span, 2.0, duration - 0.5)
    for i, start in enumerate(pair_starts):
        real_sid = f"friend_{i % 2}"
        if rng.integers(0, 2):
            leader_sid, follower_sid = real_sid, "remote_voice"
        else:
            leader_sid, follower_sid = "remote_voice", real_sid
        events.append(SoundEvent(leader_sid, _round2(start), turn))
        events.append(SoundEvent(follower_sid, _round2(start + overlap_shift), turn))

    sources.append(
        SoundSource(
            "dishes", "dish_clink@0.8", SoundCategory.REAL_WORLD, Spatial(Vec3(0.6, -0.3, 0.5)), 3
        )
    )
    for onset in _train_onsets(rng, 5, 0.8, 2.0, duration - 0.5):
        events.append(SoundEvent("dishes", _round2(onset), 0.8))

    sources.append(
        SoundSource("news_feed", "broadcast@2.5", SoundCategory.VIRTUAL, EarChannel(Ear.BOTH), 4)
    )
    for onset in _train_onsets(rng, 5, 2.5, 2.0, duration - 0.5):
        events.append(SoundEvent("news_feed", _round2(onset), 2.5))

    sources.append(
        SoundSource(
            "bar_crowd", "crowd_bed@15.0", SoundCategory.REAL_WORLD, Spatial(Vec3(0.0, 0.0, 2.5))
        )
    )
    t = 0.0
    while t + 15.0 <= duration + 1e-9:
        beds.append(SoundEvent("bar_crowd", _round2(t), 15.0))
        t += 15.0

    return _assemble("fully-mixed", seed, duration, sources, beds, events, path)


# ------------------------------------------------------------ assembly


def _assemble(
    name: str,
    seed: int,
    duration: float,
    sources: list[SoundSource],
    beds: list[SoundEvent],
    events: list[SoundEvent],
    path: ListenerPath,
) -> Scene:
    events = sorted(events, key=lambda e: (e.scheduled_onset, e.source))
    beds = sorted(beds, key=lambda e: (e.scheduled_onset, e.source))
    return Scene(
        id=f"{name}-{seed}",
        duration=duration,
        seed=seed,
        sources=tuple(sources),
        ambient_beds=tuple(beds),
        events=tuple(events),
        listener=path,
    )


_BUILDERS = {
    "rw-focused": _build_rw_focused,
    "vr-focused": _build_vr_focused,
    "fully-mixed": _build_fully_mixed,
}


def generate_scene(template: ScenarioTemplate | str, seed: int) -> Scene:
    """Deterministic scene from template and seed. If the template's event
    trains don't fit its duration, the duration stretches by up to
    MAX_EXTEND seconds before the generator gives up."""
    if isinstance(template, str):
        template = ScenarioTemplate(template)
    if template.name not in _BUILDERS:
        raise ValueError(f"unknown scenario template {template.name!r}; pick one of {TEMPLATE_NAMES}")
    builder = _BUILDERS[template.name]

    def build(duration: float) -> Scene:
        rng = np.random.default_rng(np.random.SeedSequence([seed, _salt(template.name)]))
        return builder(seed, duration, rng)

    return _extendable(build, template.duration)


def _salt(name: str) -> int:
    # Stable per-template stream separation.
    return int.from_bytes(name.encode("utf-8")[:8].ljust(8, b"\0"), "big") & 0x7FFFFFFF


def check_same_key_gaps(scene: Scene) -> list[str]:
    """Report same-key events closer than MIN_SAME_KEY_GAP; empty is good."""
    index = scene.source_index()
    by_key: dict[int, list[SoundEvent]] = {}
    for ev in scene.events:
        key = index[ev.source].identification_key
        if key is not None:
            by_key.setdefault(key, []).append(ev)
    problems = []
    for key, evs in by_key.items():
        evs = sorted(evs, key=lambda e: e.scheduled_onset)
        for a, b in zip(evs, evs[1:]):
            gap = b.scheduled_onset - (a.scheduled_onset + a.duration)
            if gap < MIN_SAME_KEY_GAP - 1e-9:
                problems.append(
                    f"key {key}: gap {gap:.3f}s between {a.source}@{a.scheduled_onset:.2f} "
                    f"and {b.source}@{b.scheduled_onset:.2f}"
                )
    return problems


# ------------------------------------------------------------ time shift


@dataclass(frozen=True)
class ShiftDecision:
    event_index: int
    actual_onset: float
    delayed: bool
    dropped: bool


@dataclass(frozen=True)
class ProtectedInterval:
    """Span of one protected event; deferrable sounds must clear it."""

    start: float
    end: float
    source: str

    def __post_init__(self) -> None:
        if not self.end > self.start:
            raise ValueError("protected interval needs end > start")


def protected_intervals(scene: Scene, plan: ManipulationPlan) -> list[ProtectedInterval]:
    """One interval per event of a protected source, in event order.

    Overlapping protected events stay unmerged; the shifter treats each as
    its own obstacle. Empty when shifting is disabled in the plan.
    """
    if not plan.time_shift.enabled:
        return []
    index = scene.source_index()
    out = []
    for ev in scene.events:
        src = index[ev.source]
        if any(selector_matches(sel, src) for sel in plan.time_shift.protected):
            out.append(
                ProtectedInterval(ev.scheduled_onset, ev.scheduled_onset + ev.duration, ev.source)
            )
    return out


def _conflicts(onset: float, duration: float, obstacles: list[tuple[float, float]], guard: float) -> bool:
    for s, t in obstacles:
        if not (onset >= t + guard - 1e-9 or onset + duration + guard <= s + 1e-9):
            return True
    return False


def time_shift(
    scene: Scene,
    protected: Sequence[ProtectedInterval],
    guard_gap: float,
    overrun_allowance: float = OVERRUN_ALLOWANCE,
) -> list[ShiftDecision]:
    """Delay deferrable events off the protected intervals.

    Only Virtual events can move; events of a source owning a protected
    interval never move. A deferrable event conflicts when its interval,
    inflated by guard_gap on both sides, intersects a protected interval or
    an already-delayed placement. It then moves to the earliest feasible
    onset at or after both its scheduled onset and the previous delayed
    onset, so delayed events keep their scheduled order. An event that
    cannot end by scene duration + overrun_allowance is dropped; its
    placement still blocks later events so re-running a decision never
    changes it.

    Results are returned in the original event-index order.
    """
    index = scene.source_index()
    pinned = {p.source for p in protected}
    obstacles: list[tuple[float, float]] = [(p.start, p.end) for p in protected]
    order = sorted(range(len(scene.events)), key=lambda i: (scene.events[i].scheduled_onset, i))

    decisions: dict[int, ShiftDecision] = {}
    last_delayed_onset = 0.0
    latest_end = scene.duration + overrun_allowance

    for i in order:
        ev = scene.events[i]
        src = index[ev.source]
        movable = src.category is SoundCategory.VIRTUAL and ev.source not in pinned
        if not movable or not _conflicts(ev.scheduled_onset, ev.duration, obstacles, guard_gap):
            decisions[i] = ShiftDecision(i, ev.scheduled_onset, delayed=False, dropped=False)
            continue

        lb = max(ev.scheduled_onset, last_delayed_onset)
        candidates = [lb] + [t + guard_gap for _, t in obstacles if t + guard_gap > lb]
        onset = None
        for c in sorted(candidates):
            if not _conflicts(c, ev.duration, obstacles, guard_gap):
                onset = c
                break
        assert onset is not None  # the slot after the last obstacle is always free
        onset = float(onset)
        dropped = bool(onset + ev.duration > latest_end + 1e-9)
        decisions[i] = ShiftDecision(i, onset, delayed=True, dropped=dropped)
        obstacles.append((onset, onset + ev.duration))
        last_delayed_onset = onset

    return [decisions[i] for i in range(len(scene.events))]
