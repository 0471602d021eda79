import math

import numpy as np
import pytest

from conftest import make_scene, make_source
from mixscape.manipulate import (
    compile_directives,
    envelope_gain,
    proximity_entries,
    transparency_cutoff,
    transparency_volume,
)
from mixscape.model import (
    Ear,
    EarChannel,
    EarconAttachment,
    ListenerPath,
    LowPass,
    ManipulationPlan,
    OnEvent,
    OnProximity,
    PitchScale,
    SoundCategory,
    SoundEvent,
    TimeShiftConfig,
    TransparencyParams,
    Vec3,
    Waypoint,
)

RW = SoundCategory.REAL_WORLD
VR = SoundCategory.VIRTUAL


def test_transparency_volume_reference_points():
    # full transparency plays real sounds at the default level
    assert transparency_volume(1.0, 0.5, 0.75) == 0.5
    # full cancelling keeps only a quarter of it
    assert transparency_volume(0.0, 0.5, 0.75) == 0.125
    # half transparency sits at 0.3125
    assert transparency_volume(0.5, 0.5, 0.75) == 0.3125


def test_transparency_volume_is_linear_in_tau(rng):
    for _ in range(100):
        tau = rng.uniform(0.0, 1.0)
        s = rng.uniform(0.1, 1.0)
        eta = rng.uniform(0.0, 1.0)
        got = transparency_volume(tau, s, eta)
        assert got == pytest.approx(s * (1.0 - eta) + tau * s * eta, abs=1e-12)
        assert got <= s + 1e-12


def test_transparency_cutoff_reference_points():
    assert transparency_cutoff(1.0, 2000.0) == 0.0
    assert transparency_cutoff(0.5, 2000.0) == 1000.0
    assert transparency_cutoff(0.0, 2000.0) == 2000.0


def test_envelope_gain_ladder():
    assert envelope_gain(1, 3.0) == 1.0
    assert envelope_gain(2, 3.0) == pytest.approx(10.0 ** (-3.0 / 20.0))
    assert envelope_gain(3, 3.0) == pytest.approx(10.0 ** (-6.0 / 20.0))
    assert envelope_gain(2, 6.0) == pytest.approx(envelope_gain(3, 3.0))


def two_source_scene(**kwargs):
    real = make_source("machine", clip="drill@2.0", category=RW, position=Vec3(0, 0, 2), key=1)
    virt = make_source("voice", clip="speech@2.0", category=VR, ear=Ear.BOTH, key=2)
    events = [SoundEvent("machine", 2.0, 2.0), SoundEvent("voice", 6.0, 2.0)]
    return make_scene([real, virt], events, **kwargs)


def directive_for(result, label):
    return next(d for d in result.directives if d.label == label)


def test_compile_transparency_applies_to_real_only():
    scene = two_source_scene()
    plan = ManipulationPlan(transparency=TransparencyParams(tau=0.5))
    result = compile_directives(scene, plan)
    real = directive_for(result, "event:e000")
    virt = directive_for(result, "event:e001")
    assert real.gain == pytest.approx(0.3125)
    assert real.transparency_cutoff == pytest.approx(1000.0)
    assert virt.gain == pytest.approx(0.5)
    assert virt.transparency_cutoff is None
    tags = {e.event_id: e.applied_manipulations for e in result.timeline.entries}
    assert "transparency:gain=0.3125" in tags["e000"]
    assert "transparency:cutoff=1000" in tags["e000"]
    assert not any(t.startswith("transparency") for t in tags["e001"])


def test_compile_full_transparency_skips_cutoff():
    scene = two_source_scene()
    plan = ManipulationPlan(transparency=TransparencyParams(tau=1.0))
    result = compile_directives(scene, plan)
    real = directive_for(result, "event:e000")
    assert real.gain == pytest.approx(0.5)
    assert real.transparency_cutoff is None
    tags = next(e.applied_manipulations for e in result.timeline.entries if e.event_id == "e000")
    assert "transparency:gain=0.5000" in tags
    assert not any("cutoff" in t for t in tags)


def test_compile_tau_automation_uses_actual_onset():
    scene = two_source_scene()
    plan = ManipulationPlan(
        transparency=TransparencyParams(tau=0.0, tau_automation=((1.5, 0.5), (4.5, 0.0)))
    )
    result = compile_directives(scene, plan)
    # the machine event starts at 2.0, inside the raised window
    assert directive_for(result, "event:e000").gain == pytest.approx(0.3125)


def test_compile_envelope_ranks_scale_gain():
    scene = two_source_scene()
    plan = ManipulationPlan(
        transparency=TransparencyParams(tau=1.0),
        envelope_ranks={"key:1": 1, "key:2": 3},
    )
    result = compile_directives(scene, plan)
    assert directive_for(result, "event:e000").gain == pytest.approx(0.5)
    assert directive_for(result, "event:e001").gain == pytest.approx(0.5 * 10 ** (-6.0 / 20.0))
    tags = {e.event_id: e.applied_manipulations for e in result.timeline.entries}
    assert "envelope:rank=1" in tags["e000"]
    assert "envelope:rank=3" in tags["e001"]


def test_compile_style_and_position_and_pitch():
    scene = two_source_scene()
    plan = ManipulationPlan(
        transparency=TransparencyParams(tau=1.0),
        style_filters={"machine": LowPass(800.0), "voice": PitchScale(1.5)},
        position_overrides={"key:2": EarChannel(Ear.RIGHT)},
    )
    result = compile_directives(scene, plan)
    real = directive_for(result, "event:e000")
    virt = directive_for(result, "event:e001")
    assert real.style == LowPass(800.0)
    assert virt.pitch_ratio == 1.5
    assert virt.style is None
    assert virt.placement == EarChannel(Ear.RIGHT)
    tags = {e.event_id: e.applied_manipulations for e in result.timeline.entries}
    assert "style:low_pass" in tags["e000"]
    assert "style:pitch_scale" in tags["e001"]
    assert "position:override" in tags["e001"]


def _blocked_scene(note_duration):
    real = make_source("alarm", clip="knock@0.6", category=RW, position=Vec3(0, 0, 1), key=3)
    virt = make_source("note", clip="speech@4.0", category=VR, ear=Ear.BOTH, key=2)
    return make_scene(
        [real, virt],
        [SoundEvent("alarm", 0.0, 12.0), SoundEvent("note", 1.0, note_duration)],
        duration=12.0,
    )


def _shift_plan():
    return ManipulationPlan(
        transparency=TransparencyParams(tau=1.0),
        time_shift=TimeShiftConfig(enabled=True, guard_gap=0.0, protected=("key:3",)),
    )


def test_compile_time_shift_delays_and_tags():
    # pushed to 12.0, ends at 16.0, inside the 5s overrun allowance
    result = compile_directives(_blocked_scene(4.0), _shift_plan())
    note = next(e for e in result.timeline.entries if e.source == "note")
    assert not note.dropped
    assert note.actual_onset == pytest.approx(12.0)
    assert "time_shift:delayed" in note.applied_manipulations
    assert any(d.label == "event:e001" for d in result.directives)


def test_compile_time_shift_drops_past_allowance():
    # pushed to 12.0, would end at 18.0 > 17.0: dropped, flagged, not rendered
    result = compile_directives(_blocked_scene(6.0), _shift_plan())
    note = next(e for e in result.timeline.entries if e.source == "note")
    assert note.dropped
    assert "time_shift:dropped" in note.applied_manipulations
    assert not any(d.label == "event:e001" for d in result.directives)
    # the dropped event stays out of the scoring set
    assert [e.source for e in result.timeline.identifiable()] == ["alarm"]


def test_compile_directive_order_is_stable():
    scene = two_source_scene()
    plan = ManipulationPlan(transparency=TransparencyParams(tau=0.5))
    a = compile_directives(scene, plan)
    b = compile_directives(scene, plan)
    assert a == b
    onsets = [d.onset for d in a.directives]
    assert onsets == sorted(onsets)


def test_compile_earcon_on_event():
    scene = two_source_scene()
    plan = ManipulationPlan(
        transparency=TransparencyParams(tau=1.0),
        earcons=(EarconAttachment("earcon_a", OnEvent("key:1"), lead_time=0.4),),
    )
    result = compile_directives(scene, plan)
    earcons = [d for d in result.directives if d.label.startswith("earcon:")]
    assert len(earcons) == 1
    assert earcons[0].onset == pytest.approx(1.6)
    assert earcons[0].clip == "earcon_a"
    assert earcons[0].placement == EarChannel(Ear.BOTH)
    assert earcons[0].gain == pytest.approx(0.5)
    tags = next(e.applied_manipulations for e in result.timeline.entries if e.event_id == "e000")
    assert "earcon:attached" in tags


def test_compile_earcon_lead_clamps_at_zero():
    real = make_source("machine", clip="drill@2.0", category=RW, position=Vec3(0, 0, 2), key=1)
    scene = make_scene([real], [SoundEvent("machine", 0.1, 2.0)])
    plan = ManipulationPlan(
        transparency=TransparencyParams(tau=1.0),
        earcons=(EarconAttachment("earcon_a", OnEvent("key:1"), lead_time=0.4),),
    )
    result = compile_directives(scene, plan)
    earcon = next(d for d in result.directives if d.label.startswith("earcon:"))
    assert earcon.onset == 0.0


def test_compile_beds_join_directives_not_timeline():
    bed_src = make_source("hum", clip="crowd_bed@2.0", category=RW, position=Vec3(0, 0, 3))
    keyed = make_source("machine", clip="drill@2.0", category=RW, position=Vec3(0, 0, 2), key=1)
    scene = make_scene([bed_src, keyed], [SoundEvent("machine", 1.0, 2.0)], beds=[SoundEvent("hum", 0.0, 2.0)])
    plan = ManipulationPlan(transparency=TransparencyParams(tau=0.0))
    result = compile_directives(scene, plan)
    bed = directive_for(result, "bed:b000")
    assert bed.gain == pytest.approx(0.125)
    assert bed.transparency_cutoff == pytest.approx(2000.0)
    assert len(result.timeline.entries) == 1


def test_proximity_entry_analytic_vs_scan(rng):
    for trial in range(60):
        n_wp = int(rng.integers(2, 5))
        times = np.sort(rng.uniform(0.0, 60.0, size=n_wp))
        times[0] = 0.0
        wps = tuple(
            Waypoint(
                float(t),
                Vec3(float(rng.uniform(-20, 20)), 0.0, float(rng.uniform(-20, 20))),
                0.0,
            )
            for t in times
        )
        path = ListenerPath(wps)
        center = Vec3(float(rng.uniform(-20, 20)), 0.0, float(rng.uniform(-20, 20)))
        radius = float(rng.uniform(2.0, 12.0))
        duration = 60.0

        got = proximity_entries(path, center, radius, duration)

        step = 0.005
        ts = np.arange(0.0, duration + step, step)
        inside = []
        for t in ts:
            pos, _ = path.at(float(t))
            inside.append((pos - center).norm() <= radius)
        want = []
        for i, flag in enumerate(inside):
            if flag and (i == 0 or not inside[i - 1]):
                want.append(ts[i])
        assert len(got) == len(want), trial
        for g, w in zip(got, want):
            assert abs(g - w) <= 2 * step, trial


def test_proximity_entry_starting_inside_fires_at_zero():
    path = ListenerPath((Waypoint(0.0, Vec3(0, 0, 0), 0.0),))
    assert proximity_entries(path, Vec3(1.0, 0.0, 0.0), 5.0, 30.0) == [0.0]
    assert proximity_entries(path, Vec3(10.0, 0.0, 0.0), 5.0, 30.0) == []


def test_compile_earcon_on_proximity():
    path = ListenerPath(
        (Waypoint(0.0, Vec3(0, 0, 0), 0.0), Waypoint(30.0, Vec3(0, 0, 60), 0.0))
    )
    site = make_source("works", clip="drill@2.0", category=RW, position=Vec3(3.0, 0.0, 30.0), key=1)
    scene = make_scene([site], [SoundEvent("works", 5.0, 2.0)], listener=path, duration=30.0)
    plan = ManipulationPlan(
        transparency=TransparencyParams(tau=1.0),
        earcons=(EarconAttachment("earcon_a", OnProximity("works", 5.0)),),
    )
    result = compile_directives(scene, plan)
    earcons = [d for d in result.directives if d.label == "earcon:proximity:works"]
    assert len(earcons) == 1
    # sphere entry at z = 30 - 4: t = 13
    assert earcons[0].onset == pytest.approx(13.0, abs=1e-6)
