"""Built-in condition presets.

Three listening conditions configure the manipulation plan:

* ft: full transparency. Real sounds pass through untouched, nothing
  else is manipulated.
* nc: noise cancelling. Real sounds are strongly attenuated and
  low-cut; nothing else is manipulated.
* ss: smart soundscape. Half transparency as the base, plus a
  per-scenario mix of envelope ranks, positions, styles, time shifts,
  and earcons tuned to what each scenario needs the listener to catch.

The ss preset is scenario-specific, so it is built against a scene.
"""

from __future__ import annotations

from .model import (
    Ear,
    EarChannel,
    EarconAttachment,
    LowPass,
    ManipulationPlan,
    OnEvent,
    OnProximity,
    Scene,
    Telephone,
    TimeShiftConfig,
    TransparencyParams,
)

CONDITIONS = ("ft", "nc", "ss")

SS_GUARD_GAP = 0.25
DRILL_WARN_RADIUS = 10.0


def full_transparency_plan() -> ManipulationPlan:
    return ManipulationPlan(transparency=TransparencyParams(tau=1.0))


def noise_cancelling_plan() -> ManipulationPlan:
    return ManipulationPlan(transparency=TransparencyParams(tau=0.0))


def _ss_rw_focused(scene: Scene) -> ManipulationPlan:
    drills = [s.id for s in scene.sources if s.id.startswith("drill")]
    return ManipulationPlan(
        transparency=TransparencyParams(tau=0.5),
        envelope_ranks={"key:1": 1, "key:2": 2, "key:3": 3, "key:4": 4},
        position_overrides={
            "key:3": EarChannel(Ear.LEFT),
            "key:4": EarChannel(Ear.RIGHT),
        },
        style_filters={"key:2": LowPass(800.0)},
        time_shift=TimeShiftConfig(enabled=True, guard_gap=SS_GUARD_GAP, protected=("key:1", "key:2")),
        earcons=tuple(
            EarconAttachment("earcon_a", OnProximity(d, DRILL_WARN_RADIUS)) for d in drills
        ),
    )


def _ss_vr_focused(scene: Scene) -> ManipulationPlan:
    # Open the mic for each overhead announcement: half transparency from
    # its onset, back to full cancelling when it ends. Announcements are
    # protected from time shift, so scheduled onsets are actual onsets.
    index = scene.source_index()
    automation: list[tuple[float, float]] = []
    for ev in scene.events:
        if index[ev.source].identification_key == 4:
            automation.append((ev.scheduled_onset, 0.5))
            automation.append((ev.scheduled_onset + ev.duration, 0.0))
    automation.sort()
    return ManipulationPlan(
        transparency=TransparencyParams(tau=0.0, tau_automation=tuple(automation)),
        envelope_ranks={"key:3": 1, "key:4": 2, "key:1": 3, "key:2": 4},
        position_overrides={
            "key:1": EarChannel(Ear.LEFT),
            "key:2": EarChannel(Ear.RIGHT),
        },
        time_shift=TimeShiftConfig(enabled=True, guard_gap=SS_GUARD_GAP, protected=("key:3", "key:4")),
    )


def _ss_fully_mixed(scene: Scene) -> ManipulationPlan:
    return ManipulationPlan(
        transparency=TransparencyParams(tau=0.5),
        envelope_ranks={"key:1": 1, "key:2": 1, "key:3": 2, "key:4": 3},
        position_overrides={"key:4": EarChannel(Ear.RIGHT)},
        style_filters={"key:2": Telephone(300.0, 3400.0)},
        time_shift=TimeShiftConfig(enabled=True, guard_gap=SS_GUARD_GAP, protected=("key:1", "key:3")),
        earcons=(
            EarconAttachment("earcon_a", OnEvent("key:3")),
            EarconAttachment("earcon_b", OnEvent("key:4")),
        ),
    )


_SS_BUILDERS = {
    "rw-focused": _ss_rw_focused,
    "vr-focused": _ss_vr_focused,
    "fully-mixed": _ss_fully_mixed,
}


def smart_soundscape_plan(scene: Scene) -> ManipulationPlan:
    for prefix, builder in _SS_BUILDERS.items():
        if scene.id.startswith(prefix):
            return builder(scene)
    raise ValueError(
        f"no smart-soundscape preset for scene {scene.id!r}; "
        "pass an explicit plan file for custom scenes"
    )


def build_plan(condition: str, scene: Scene) -> ManipulationPlan:
    if condition == "ft":
        return full_transparency_plan()
    if condition == "nc":
        return noise_cancelling_plan()
    if condition == "ss":
        return smart_soundscape_plan(scene)
    raise ValueError(f"unknown condition {condition!r}; pick one of {CONDITIONS}")
