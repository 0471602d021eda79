import json

import pytest

from conftest import make_scene, make_source
from mixscape import sceneio
from mixscape.model import (
    Ear,
    EarChannel,
    EarconAttachment,
    HighPass,
    InvariantError,
    LowPass,
    ManipulationPlan,
    OnEvent,
    OnProximity,
    PitchScale,
    SchemaError,
    SoundCategory,
    SoundEvent,
    Telephone,
    TimeShiftConfig,
    Timeline,
    TimelineEntry,
    TransparencyParams,
)
from mixscape.scheduler import generate_scene


def full_plan() -> ManipulationPlan:
    return ManipulationPlan(
        transparency=TransparencyParams(tau=0.25, tau_automation=((1.0, 0.5), (2.0, 0.0))),
        envelope_ranks={"key:1": 1, "drill_a": 2},
        envelope_rank_step_db=4.5,
        position_overrides={"key:3": EarChannel(Ear.LEFT)},
        style_filters={
            "key:2": LowPass(800.0),
            "key:3": HighPass(300.0),
            "key:4": Telephone(300.0, 3400.0),
            "voice": PitchScale(1.25),
        },
        time_shift=TimeShiftConfig(enabled=True, guard_gap=0.25, protected=("key:1",)),
        earcons=(
            EarconAttachment("earcon_a", OnEvent("key:3"), lead_time=0.3),
            EarconAttachment("earcon_b", OnProximity("drill_a", 10.0)),
        ),
    )


def test_scene_round_trip_is_identity():
    scene = generate_scene("rw-focused", 11)
    obj = sceneio.scene_to_obj(scene)
    assert sceneio.obj_to_scene(obj) == scene


def test_plan_round_trip_is_identity():
    plan = full_plan()
    assert sceneio.obj_to_plan(sceneio.plan_to_obj(plan)) == plan


def test_timeline_round_trip_is_identity():
    tl = Timeline(
        (
            TimelineEntry(
                event_id="e000",
                source="s1",
                identification_key=2,
                category=SoundCategory.VIRTUAL,
                scheduled_onset=1.0,
                actual_onset=2.5,
                duration=1.5,
                applied_manipulations=("time_shift:delayed", "envelope:rank=2"),
                dropped=False,
            ),
        )
    )
    assert sceneio.obj_to_timeline(sceneio.timeline_to_obj(tl)) == tl


def test_serialization_is_canonical():
    scene = generate_scene("vr-focused", 3)
    a = sceneio.dumps(sceneio.scene_to_obj(scene))
    b = sceneio.dumps(sceneio.scene_to_obj(sceneio.obj_to_scene(json.loads(a))))
    assert a == b
    assert a.endswith("\n")
    # keys come out sorted
    obj = json.loads(a)
    assert list(obj) == sorted(obj)


def test_save_load_files(tmp_path):
    scene = generate_scene("fully-mixed", 5)
    plan = full_plan()
    spath = tmp_path / "scene.json"
    ppath = tmp_path / "plan.json"
    sceneio.save_scene(scene, str(spath))
    sceneio.save_plan(plan, str(ppath))
    assert sceneio.load_scene(str(spath)) == scene
    assert sceneio.load_plan(str(ppath)) == plan


def test_schema_error_names_path():
    obj = sceneio.scene_to_obj(generate_scene("rw-focused", 1))
    del obj["sources"][0]["clip"]
    with pytest.raises(SchemaError) as err:
        sceneio.obj_to_scene(obj)
    assert "$.sources[0].clip" in str(err.value)


def test_schema_error_on_wrong_types():
    obj = sceneio.scene_to_obj(generate_scene("rw-focused", 1))
    obj["duration"] = "ninety"
    with pytest.raises(SchemaError) as err:
        sceneio.obj_to_scene(obj)
    assert "$.duration" in str(err.value)


def test_schema_rejects_unknown_kind_and_version():
    obj = sceneio.scene_to_obj(generate_scene("rw-focused", 1))
    obj["kind"] = "mystery"
    with pytest.raises(SchemaError):
        sceneio.obj_to_scene(obj)
    obj["kind"] = "scene"
    obj["schema_version"] = 99
    with pytest.raises(SchemaError):
        sceneio.obj_to_scene(obj)


def test_schema_rejects_unknown_enum_values():
    obj = sceneio.scene_to_obj(generate_scene("rw-focused", 1))
    obj["sources"][0]["category"] = "Imaginary"
    with pytest.raises(SchemaError) as err:
        sceneio.obj_to_scene(obj)
    assert "category" in str(err.value)
    pobj = sceneio.plan_to_obj(full_plan())
    pobj["style_filters"]["key:2"] = {"type": "comb"}
    with pytest.raises(SchemaError):
        sceneio.obj_to_plan(pobj)


def test_load_scene_rejects_invariant_violations(tmp_path):
    scene = make_scene([make_source("s1", key=1)], [SoundEvent("other", 0.0, 1.0)])
    path = tmp_path / "bad.json"
    path.write_text(sceneio.dumps(sceneio.scene_to_obj(scene)))
    with pytest.raises(InvariantError) as err:
        sceneio.load_scene(str(path))
    assert any(v.rule == "event.source-exists" for v in err.value.violations)


def test_load_rejects_invalid_json(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{nope")
    with pytest.raises(SchemaError):
        sceneio.load_scene(str(path))


def test_optional_plan_fields_default():
    obj = {
        "schema_version": 1,
        "kind": "plan",
        "transparency": {"tau": 1.0},
    }
    plan = sceneio.obj_to_plan(obj)
    assert plan.transparency.eta == 0.75
    assert plan.transparency.s_default == 0.5
    assert plan.transparency.z == 2000.0
    assert plan.envelope_ranks == {}
    assert plan.time_shift.enabled is False
    assert plan.earcons == ()
