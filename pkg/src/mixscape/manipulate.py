"""Compile a scene plus a manipulation plan into render directives.

Compilation runs the six manipulations in a fixed order:

1. time shift moves deferrable events off the protected lanes,
2. transparency sets each real-world sound's gain and high-pass cutoff
   from the transparency level at its actual onset,
3. envelope scales gains by identification-rank steps,
4. style picks each sound's filter chain or pitch ratio,
5. position applies placement overrides,
6. earcons are attached to matching events and proximity entries.

The result is a flat list of directives the renderer can mix without
consulting the plan again, plus the timeline of identifiable events.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    Ear,
    EarChannel,
    HighPass,
    ListenerPath,
    LowPass,
    ManipulationPlan,
    OnEvent,
    OnProximity,
    PitchScale,
    Placement,
    Scene,
    SoundCategory,
    Spatial,
    StyleFilter,
    Telephone,
    Timeline,
    TimelineEntry,
    Vec3,
    resolve_selector_map,
    selector_matches,
)
from .scheduler import ShiftDecision, protected_intervals, time_shift

EARCON_LEAD_DEFAULT = 0.4


@dataclass(frozen=True)
class RenderDirective:
    """One placed clip, fully resolved: what, when, how loud, where."""

    clip: str
    onset: float
    gain: float
    placement: Placement
    category: SoundCategory
    style: StyleFilter | None = None
    transparency_cutoff: float | None = None
    pitch_ratio: float | None = None
    label: str = ""


@dataclass(frozen=True)
class CompileResult:
    directives: tuple[RenderDirective, ...]
    timeline: Timeline


def transparency_volume(tau: float, s_default: float, eta: float) -> float:
    """Real-world playback level for transparency tau: the default level
    minus the blocked share scaled by the blocking strength."""
    return s_default - ((1.0 - tau) * s_default * eta)

def transparency_cutoff(tau: float, z: float) -> float:
    """High-pass cutoff for real-world sounds; 0 means no filtering."""
    return (1.0 - tau) * z


def envelope_gain(rank: int, step_db: float) -> float:
    """Rank 1 keeps unity gain; each further rank steps down step_db."""
    return 10.0 ** (-(rank - 1) * step_db / 20.0)


def _style_tag(style: StyleFilter) -> str:
    if isinstance(style, LowPass):
        return "style:low_pass"
    if isinstance(style, HighPass):
        return "style:high_pass"
    if isinstance(style, Telephone):
        return "style:telephone"
    return "style:pitch_scale"


def proximity_entries(
    path: ListenerPath, center: Vec3, radius: float, duration: float
) -> list[float]:
    """Times at which the listener path enters the sphere around center.

    A path that starts inside yields an entry at time zero. Tangential
    grazes do not count. Entries past the scene duration are discarded.
    """
    segments: list[tuple[float, float, Vec3, Vec3]] = []
    wps = path.waypoints
    for a, b in zip(wps, wps[1:]):
        segments.append((a.time, b.time, a.position, b.position))
    if not segments or wps[-1].time < duration:
        last = wps[-1]
        segments.append((last.time, max(duration, last.time + 1.0), last.position, last.position))

    r2 = radius * radius
    inside_intervals: list[tuple[float, float]] = []
    for t0, t1, pa, pb in segments:
        rel = pa - center
        v = pb - pa
        c0 = rel.x**2 + rel.y**2 + rel.z**2 - r2
        c1 = 2.0 * (rel.x * v.x + rel.y * v.y + rel.z * v.z)
        c2 = v.x**2 + v.y**2 + v.z**2
        if c2 < 1e-18:
            if c0 <= 0.0:
                inside_intervals.append((t0, t1))
            continue
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc <= 0.0:
            continue
        sq = math.sqrt(disc)
        u_lo = (-c1 - sq) / (2.0 * c2)
        u_hi = (-c1 + sq) / (2.0 * c2)
        u_lo, u_hi = max(u_lo, 0.0), min(u_hi, 1.0)
        if u_lo < u_hi:
            inside_intervals.append((t0 + u_lo * (t1 - t0), t0 + u_hi * (t1 - t0)))

    if not inside_intervals:
        return []
    inside_intervals.sort()
    merged = [inside_intervals[0]]
    for s, t in inside_intervals[1:]:
        ps, pt = merged[-1]
        if s <= pt + 1e-9:
            merged[-1] = (ps, max(pt, t))
        else:
            merged.append((s, t))
    return [s for s, _t in merged if s <= duration + 1e-9]


def compile_directives(scene: Scene, plan: ManipulationPlan) -> CompileResult:
    index = scene.source_index()
    tp = plan.transparency

    if plan.time_shift.enabled:
        intervals = protected_intervals(scene, plan)
        decisions = time_shift(scene, intervals, plan.time_shift.guard_gap)
    else:
        decisions = [
            ShiftDecision(i, ev.scheduled_onset, delayed=False, dropped=False)
            for i, ev in enumerate(scene.events)
        ]

    directives: list[RenderDirective] = []
    entries: list[TimelineEntry] = []

    def resolve(src, onset: float, tags: list[str]) -> tuple[float, Placement, StyleFilter | None, float | None, float | None]:
        """Gain, placement, filter, transparency cutoff, pitch ratio."""
        if src.category is SoundCategory.REAL_WORLD:
            tau = tp.tau_at(onset)
            gain = transparency_volume(tau, tp.s_default, tp.eta)
            cutoff = transparency_cutoff(tau, tp.z)
            tags.append(f"transparency:gain={gain:.4f}")
            if cutoff > 0.0:
                tags.append(f"transparency:cutoff={cutoff:.0f}")
            else:
                cutoff = None
        else:
            gain = tp.s_default
            cutoff = None

        rank = resolve_selector_map(plan.envelope_ranks, src)
        if rank is not None:
            gain *= envelope_gain(rank, plan.envelope_rank_step_db)
            tags.append(f"envelope:rank={rank}")

        style = resolve_selector_map(plan.style_filters, src)
        pitch = None
        if isinstance(style, PitchScale):
            pitch = style.ratio
            tags.append(_style_tag(style))
            style = None
        elif style is not None:
            tags.append(_style_tag(style))

        placement = resolve_selector_map(plan.position_overrides, src)
        if placement is not None:
            tags.append("position:override")
        else:
            placement = src.placement
        return gain, placement, style, cutoff, pitch

    on_event_attachments = [a for a in plan.earcons if isinstance(a.trigger, OnEvent)]

    for i, ev in enumerate(scene.events):
        src = index[ev.source]
        decision = decisions[i]
        tags: list[str] = []
        if decision.delayed:
            tags.append("time_shift:dropped" if decision.dropped else "time_shift:delayed")
        gain, placement, style, cutoff, pitch = resolve(src, decision.actual_onset, tags)

        attached = False
        for att in on_event_attachments:
            if selector_matches(att.trigger.selector, src) and not decision.dropped:
                attached = True
                directives.append(
                    RenderDirective(
                        clip=att.earcon_clip,
                        onset=max(0.0, decision.actual_onset - att.lead_time),
                        gain=tp.s_default,
                        placement=_both_ears(),
                        category=SoundCategory.VIRTUAL,
                        label=f"earcon:on_event:e{i:03d}",
                    )
                )
        if attached:
            tags.append("earcon:attached")

        if src.identification_key is not None:
            entries.append(
                TimelineEntry(
                    event_id=f"e{i:03d}",
                    source=src.id,
                    identification_key=src.identification_key,
                    category=src.category,
                    scheduled_onset=ev.scheduled_onset,
                    actual_onset=decision.actual_onset,
                    duration=ev.duration,
                    applied_manipulations=tuple(tags),
                    dropped=decision.dropped,
                )
            )
        if not decision.dropped:
            directives.append(
                RenderDirective(
                    clip=src.clip,
                    onset=decision.actual_onset,
                    gain=gain,
                    placement=placement,
                    category=src.category,
                    style=style,
                    transparency_cutoff=cutoff,
                    pitch_ratio=pitch,
                    label=f"event:e{i:03d}",
                )
            )

    for i, ev in enumerate(scene.ambient_beds):
        src = index[ev.source]
        tags: list[str] = []
        gain, placement, style, cutoff, pitch = resolve(src, ev.scheduled_onset, tags)
        directives.append(
            RenderDirective(
                clip=src.clip,
                onset=ev.scheduled_onset,
                gain=gain,
                placement=placement,
                category=src.category,
                style=style,
                transparency_cutoff=cutoff,
                pitch_ratio=pitch,
                label=f"bed:b{i:03d}",
            )
        )

    for att in plan.earcons:
        if not isinstance(att.trigger, OnProximity):
            continue
        src = index.get(att.trigger.source)
        if src is None:
            raise ValueError(
                f"earcon proximity trigger references missing source {att.trigger.source!r}"
            )
        if not isinstance(src.placement, Spatial):
            raise ValueError(f"proximity trigger needs a spatial source, got {src.id!r}")
        for entry_t in proximity_entries(
            scene.listener, src.placement.position, att.trigger.radius, scene.duration
        ):
            directives.append(
                RenderDirective(
                    clip=att.earcon_clip,
                    onset=entry_t,
                    gain=tp.s_default,
                    placement=_both_ears(),
                    category=SoundCategory.VIRTUAL,
                    label=f"earcon:proximity:{src.id}",
                )
            )

    directives.sort(key=lambda d: (d.onset, d.label))
    entries.sort(key=lambda e: (e.actual_onset, e.event_id))
    return CompileResult(tuple(directives), Timeline(tuple(entries)))


def _both_ears() -> Placement:
    return EarChannel(Ear.BOTH)
