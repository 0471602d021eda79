"""JSON serialization for scenes, plans, and timelines.

Documents carry schema_version and a kind tag. Serialization is canonical:
sorted keys, two-space indent, trailing newline, so equal values produce
byte-equal files.
"""

from __future__ import annotations

import json
from typing import Any

from .model import (
    SCHEMA_VERSION,
    Ear,
    EarChannel,
    EarconAttachment,
    HighPass,
    InvariantError,
    ListenerPath,
    LowPass,
    ManipulationPlan,
    OnEvent,
    OnProximity,
    PitchScale,
    Placement,
    Scene,
    SchemaError,
    SoundCategory,
    SoundEvent,
    SoundSource,
    Spatial,
    StyleFilter,
    Telephone,
    Timeline,
    TimelineEntry,
    TimeShiftConfig,
    TransparencyParams,
    Trigger,
    Vec3,
    Waypoint,
    validate_plan,
    validate_scene,
    validate_timeline,
)

# ---------------------------------------------------------------- encoding


def _vec3_to_obj(v: Vec3) -> list[float]:
    return [v.x, v.y, v.z]


def _placement_to_obj(p: Placement) -> dict[str, Any]:
    if isinstance(p, Spatial):
        return {"type": "spatial", "position": _vec3_to_obj(p.position)}
    return {"type": "ear_channel", "channel": p.channel.value}


def _style_to_obj(f: StyleFilter) -> dict[str, Any]:
    if isinstance(f, LowPass):
        return {"type": "low_pass", "cutoff": f.cutoff}
    if isinstance(f, HighPass):
        return {"type": "high_pass", "cutoff": f.cutoff}
    if isinstance(f, Telephone):
        return {"type": "telephone", "low": f.low, "high": f.high}
    return {"type": "pitch_scale", "ratio": f.ratio}


def _trigger_to_obj(t: Trigger) -> dict[str, Any]:
    if isinstance(t, OnEvent):
        return {"type": "on_event", "selector": t.selector}
    return {"type": "on_proximity", "source": t.source, "radius": t.radius}


def _event_to_obj(e: SoundEvent) -> dict[str, Any]:
    return {"source": e.source, "scheduled_onset": e.scheduled_onset, "duration": e.duration}


def scene_to_obj(scene: Scene) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "scene",
        "id": scene.id,
        "duration": scene.duration,
        "seed": scene.seed,
        "sources": [
            {
                "id": s.id,
                "clip": s.clip,
                "category": s.category.value,
                "placement": _placement_to_obj(s.placement),
                "identification_key": s.identification_key,
                "protected": s.protected,
            }
            for s in scene.sources
        ],
        "ambient_beds": [_event_to_obj(e) for e in scene.ambient_beds],
        "events": [_event_to_obj(e) for e in scene.events],
        "listener": {
            "waypoints": [
                {"time": w.time, "position": _vec3_to_obj(w.position), "yaw": w.yaw}
                for w in scene.listener.waypoints
            ]
        },
    }


def plan_to_obj(plan: ManipulationPlan) -> dict[str, Any]:
    tp = plan.transparency
    transparency: dict[str, Any] = {
        "tau": tp.tau,
        "eta": tp.eta,
        "s_default": tp.s_default,
        "z": tp.z,
    }
    if tp.tau_automation is not None:
        transparency["tau_automation"] = [[t, tau] for t, tau in tp.tau_automation]
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "plan",
        "transparency": transparency,
        "envelope_ranks": dict(plan.envelope_ranks),
        "envelope_rank_step_db": plan.envelope_rank_step_db,
        "position_overrides": {
            sel: _placement_to_obj(p) for sel, p in plan.position_overrides.items()
        },
        "style_filters": {sel: _style_to_obj(f) for sel, f in plan.style_filters.items()},
        "time_shift": {
            "enabled": plan.time_shift.enabled,
            "guard_gap": plan.time_shift.guard_gap,
            "protected": list(plan.time_shift.protected),
        },
        "earcons": [
            {
                "earcon_clip": a.earcon_clip,
                "trigger": _trigger_to_obj(a.trigger),
                "lead_time": a.lead_time,
            }
            for a in plan.earcons
        ],
    }


def timeline_to_obj(timeline: Timeline) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "timeline",
        "entries": [
            {
                "event_id": e.event_id,
                "source": e.source,
                "identification_key": e.identification_key,
                "category": e.category.value,
                "scheduled_onset": e.scheduled_onset,
                "actual_onset": e.actual_onset,
                "duration": e.duration,
                "applied_manipulations": list(e.applied_manipulations),
                "dropped": e.dropped,
            }
            for e in timeline.entries
        ],
    }


def dumps(obj: dict[str, Any]) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------- decoding


def _want(obj: Any, path: str, typ: type | tuple[type, ...], what: str) -> Any:
    if typ is float and isinstance(obj, int) and not isinstance(obj, bool):
        return float(obj)
    if not isinstance(obj, typ) or isinstance(obj, bool) and typ is not bool:
        raise SchemaError(path, f"expected {what}, got {type(obj).__name__}")
    return obj


def _want_key(obj: dict[str, Any], path: str, key: str) -> Any:
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing required field")
    return obj[key]


def _obj_to_vec3(obj: Any, path: str) -> Vec3:
    arr = _want(obj, path, list, "a [x, y, z] array")
    if len(arr) != 3:
        raise SchemaError(path, f"expected 3 components, got {len(arr)}")
    return Vec3(*(_want(c, f"{path}[{i}]", float, "a number") for i, c in enumerate(arr)))


def _obj_to_placement(obj: Any, path: str) -> Placement:
    d = _want(obj, path, dict, "a placement object")
    typ = _want_key(d, path, "type")
    if typ == "spatial":
        return Spatial(_obj_to_vec3(_want_key(d, path, "position"), f"{path}.position"))
    if typ == "ear_channel":
        channel = _want_key(d, path, "channel")
        try:
            return EarChannel(Ear(channel))
        except ValueError:
            raise SchemaError(f"{path}.channel", f"unknown ear channel {channel!r}") from None
    raise SchemaError(f"{path}.type", f"unknown placement type {typ!r}")


def _obj_to_style(obj: Any, path: str) -> StyleFilter:
    d = _want(obj, path, dict, "a style filter object")
    typ = _want_key(d, path, "type")
    if typ == "low_pass":
        return LowPass(_want(_want_key(d, path, "cutoff"), f"{path}.cutoff", float, "a number"))
    if typ == "high_pass":
        return HighPass(_want(_want_key(d, path, "cutoff"), f"{path}.cutoff", float, "a number"))
    if typ == "telephone":
        return Telephone(
            _want(_want_key(d, path, "low"), f"{path}.low", float, "a number"),
            _want(_want_key(d, path, "high"), f"{path}.high", float, "a number"),
        )
    if typ == "pitch_scale":
        return PitchScale(_want(_want_key(d, path, "ratio"), f"{path}.ratio", float, "a number"))
    raise SchemaError(f"{path}.type", f"unknown style filter type {typ!r}")


def _obj_to_trigger(obj: Any, path: str) -> Trigger:
    d = _want(obj, path, dict, "a trigger object")
    typ = _want_key(d, path, "type")
    if typ == "on_event":
        return OnEvent(_want(_want_key(d, path, "selector"), f"{path}.selector", str, "a string"))
    if typ == "on_proximity":
        return OnProximity(
            _want(_want_key(d, path, "source"), f"{path}.source", str, "a string"),
            _want(_want_key(d, path, "radius"), f"{path}.radius", float, "a number"),
        )
    raise SchemaError(f"{path}.type", f"unknown trigger type {typ!r}")


def _obj_to_event(obj: Any, path: str) -> SoundEvent:
    d = _want(obj, path, dict, "an event object")
    return SoundEvent(
        source=_want(_want_key(d, path, "source"), f"{path}.source", str, "a string"),
        scheduled_onset=_want(
            _want_key(d, path, "scheduled_onset"), f"{path}.scheduled_onset", float, "a number"
        ),
        duration=_want(_want_key(d, path, "duration"), f"{path}.duration", float, "a number"),
    )


def _check_header(d: dict[str, Any], kind: str) -> None:
    version = _want_key(d, "$", "schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError("$.schema_version", f"unsupported version {version!r}")
    got = _want_key(d, "$", "kind")
    if got != kind:
        raise SchemaError("$.kind", f"expected {kind!r}, got {got!r}")


def obj_to_scene(obj: Any) -> Scene:
    d = _want(obj, "$", dict, "a scene object")
    _check_header(d, "scene")
    sources = []
    for i, s in enumerate(_want(_want_key(d, "$", "sources"), "$.sources", list, "an array")):
        path = f"$.sources[{i}]"
        sd = _want(s, path, dict, "a source object")
        category = _want_key(sd, path, "category")
        try:
            cat = SoundCategory(category)
        except ValueError:
            raise SchemaError(f"{path}.category", f"unknown category {category!r}") from None
        key = sd.get("identification_key")
        if key is not None:
            key = _want(key, f"{path}.identification_key", int, "an integer or null")
        sources.append(
            SoundSource(
                id=_want(_want_key(sd, path, "id"), f"{path}.id", str, "a string"),
                clip=_want(_want_key(sd, path, "clip"), f"{path}.clip", str, "a string"),
                category=cat,
                placement=_obj_to_placement(_want_key(sd, path, "placement"), f"{path}.placement"),
                identification_key=key,
                protected=_want(sd.get("protected", False), f"{path}.protected", bool, "a boolean"),
            )
        )
    listener_obj = _want(_want_key(d, "$", "listener"), "$.listener", dict, "an object")
    waypoints = []
    wp_list = _want(
        _want_key(listener_obj, "$.listener", "waypoints"), "$.listener.waypoints", list, "an array"
    )
    for i, w in enumerate(wp_list):
        path = f"$.listener.waypoints[{i}]"
        wd = _want(w, path, dict, "a waypoint object")
        waypoints.append(
            Waypoint(
                time=_want(_want_key(wd, path, "time"), f"{path}.time", float, "a number"),
                position=_obj_to_vec3(_want_key(wd, path, "position"), f"{path}.position"),
                yaw=_want(_want_key(wd, path, "yaw"), f"{path}.yaw", float, "a number"),
            )
        )
    return Scene(
        id=_want(_want_key(d, "$", "id"), "$.id", str, "a string"),
        duration=_want(_want_key(d, "$", "duration"), "$.duration", float, "a number"),
        seed=_want(_want_key(d, "$", "seed"), "$.seed", int, "an integer"),
        sources=tuple(sources),
        ambient_beds=tuple(
            _obj_to_event(e, f"$.ambient_beds[{i}]")
            for i, e in enumerate(
                _want(_want_key(d, "$", "ambient_beds"), "$.ambient_beds", list, "an array")
            )
        ),
        events=tuple(
            _obj_to_event(e, f"$.events[{i}]")
            for i, e in enumerate(_want(_want_key(d, "$", "events"), "$.events", list, "an array"))
        ),
        listener=ListenerPath(tuple(waypoints)),
    )


def obj_to_plan(obj: Any) -> ManipulationPlan:
    d = _want(obj, "$", dict, "a plan object")
    _check_header(d, "plan")
    tp = _want(_want_key(d, "$", "transparency"), "$.transparency", dict, "an object")
    automation = None
    if tp.get("tau_automation") is not None:
        points = _want(tp["tau_automation"], "$.transparency.tau_automation", list, "an array")
        pairs = []
        for i, p in enumerate(points):
            path = f"$.transparency.tau_automation[{i}]"
            pair = _want(p, path, list, "a [time, tau] pair")
            if len(pair) != 2:
                raise SchemaError(path, f"expected 2 elements, got {len(pair)}")
            pairs.append(
                (
                    _want(pair[0], f"{path}[0]", float, "a number"),
                    _want(pair[1], f"{path}[1]", float, "a number"),
                )
            )
        automation = tuple(pairs)
    transparency = TransparencyParams(
        tau=_want(_want_key(tp, "$.transparency", "tau"), "$.transparency.tau", float, "a number"),
        eta=_want(tp.get("eta", 0.75), "$.transparency.eta", float, "a number"),
        s_default=_want(tp.get("s_default", 0.5), "$.transparency.s_default", float, "a number"),
        z=_want(tp.get("z", 2000.0), "$.transparency.z", float, "a number"),
        tau_automation=automation,
    )
    ranks_obj = _want(d.get("envelope_ranks", {}), "$.envelope_ranks", dict, "an object")
    ranks = {
        sel: _want(r, f"$.envelope_ranks[{sel!r}]", int, "an integer") for sel, r in ranks_obj.items()
    }
    pos_obj = _want(d.get("position_overrides", {}), "$.position_overrides", dict, "an object")
    overrides = {
        sel: _obj_to_placement(p, f"$.position_overrides[{sel!r}]") for sel, p in pos_obj.items()
    }
    style_obj = _want(d.get("style_filters", {}), "$.style_filters", dict, "an object")
    styles = {sel: _obj_to_style(f, f"$.style_filters[{sel!r}]") for sel, f in style_obj.items()}
    ts_obj = _want(d.get("time_shift", {}), "$.time_shift", dict, "an object")
    time_shift = TimeShiftConfig(
        enabled=_want(ts_obj.get("enabled", False), "$.time_shift.enabled", bool, "a boolean"),
        guard_gap=_want(ts_obj.get("guard_gap", 0.0), "$.time_shift.guard_gap", float, "a number"),
        protected=tuple(
            _want(s, f"$.time_shift.protected[{i}]", str, "a string")
            for i, s in enumerate(
                _want(ts_obj.get("protected", []), "$.time_shift.protected", list, "an array")
            )
        ),
    )
    earcons = []
    for i, a in enumerate(_want(d.get("earcons", []), "$.earcons", list, "an array")):
        path = f"$.earcons[{i}]"
        ad = _want(a, path, dict, "an earcon attachment object")
        earcons.append(
            EarconAttachment(
                earcon_clip=_want(
                    _want_key(ad, path, "earcon_clip"), f"{path}.earcon_clip", str, "a string"
                ),
                trigger=_obj_to_trigger(_want_key(ad, path, "trigger"), f"{path}.trigger"),
                lead_time=_want(ad.get("lead_time", 0.4), f"{path}.lead_time", float, "a number"),
            )
        )
    return ManipulationPlan(
        transparency=transparency,
        envelope_ranks=ranks,
        envelope_rank_step_db=_want(
            d.get("envelope_rank_step_db", 3.0), "$.envelope_rank_step_db", float, "a number"
        ),
        position_overrides=overrides,
        style_filters=styles,
        time_shift=time_shift,
        earcons=tuple(earcons),
    )


def obj_to_timeline(obj: Any) -> Timeline:
    d = _want(obj, "$", dict, "a timeline object")
    _check_header(d, "timeline")
    entries = []
    for i, e in enumerate(_want(_want_key(d, "$", "entries"), "$.entries", list, "an array")):
        path = f"$.entries[{i}]"
        ed = _want(e, path, dict, "a timeline entry object")
        category = _want_key(ed, path, "category")
        try:
            cat = SoundCategory(category)
        except ValueError:
            raise SchemaError(f"{path}.category", f"unknown category {category!r}") from None
        key = ed.get("identification_key")
        if key is not None:
            key = _want(key, f"{path}.identification_key", int, "an integer or null")
        entries.append(
            TimelineEntry(
                event_id=_want(_want_key(ed, path, "event_id"), f"{path}.event_id", str, "a string"),
                source=_want(_want_key(ed, path, "source"), f"{path}.source", str, "a string"),
                identification_key=key,
                category=cat,
                scheduled_onset=_want(
                    _want_key(ed, path, "scheduled_onset"), f"{path}.scheduled_onset", float, "a number"
                ),
                actual_onset=_want(
                    _want_key(ed, path, "actual_onset"), f"{path}.actual_onset", float, "a number"
                ),
                duration=_want(_want_key(ed, path, "duration"), f"{path}.duration", float, "a number"),
                applied_manipulations=tuple(
                    _want(t, f"{path}.applied_manipulations[{j}]", str, "a string")
                    for j, t in enumerate(
                        _want(
                            ed.get("applied_manipulations", []),
                            f"{path}.applied_manipulations",
                            list,
                            "an array",
                        )
                    )
                ),
                dropped=_want(ed.get("dropped", False), f"{path}.dropped", bool, "a boolean"),
            )
        )
    return Timeline(tuple(entries))


# ---------------------------------------------------------------- file API


def save_scene(scene: Scene, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(scene_to_obj(scene)))


def save_plan(plan: ManipulationPlan, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(plan_to_obj(plan)))


def save_timeline(timeline: Timeline, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(timeline_to_obj(timeline)))


def _load_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"not valid JSON: {exc}") from None


def load_scene(path: str) -> Scene:
    """Parse and validate; raises SchemaError or InvariantError."""
    scene = obj_to_scene(_load_json(path))
    violations = validate_scene(scene)
    if violations:
        raise InvariantError(violations)
    return scene


def load_plan(path: str) -> ManipulationPlan:
    plan = obj_to_plan(_load_json(path))
    violations = validate_plan(plan)
    if violations:
        raise InvariantError(violations)
    return plan


def load_timeline(path: str) -> Timeline:
    timeline = obj_to_timeline(_load_json(path))
    violations = validate_timeline(timeline)
    if violations:
        raise InvariantError(violations)
    return timeline
