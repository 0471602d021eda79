"""Regenerates the browser app's test fixtures from the engine.

Run from this directory with the mixscape package installed:

    python3 make_fixtures.py

Writes into ../test/fixtures:
  scoring.json       50 scoring cases (timeline + presses + engine report)
  demo.wav           a short rendered bundle for loader tests
  demo.timeline.json timeline matching demo.wav

Everything is seeded, so reruns are byte-identical.
"""

import json
import os

import numpy as np

from mixscape.assets import ClipBank
from mixscape.manipulate import compile_directives
from mixscape.model import (
    Ear,
    EarChannel,
    ListenerPath,
    Scene,
    SoundCategory,
    SoundEvent,
    SoundSource,
    Spatial,
    Vec3,
    Waypoint,
)
from mixscape.plans import build_plan
from mixscape.render import render, write_wav
from mixscape.scheduler import generate_scene
from mixscape.sceneio import save_timeline, timeline_to_obj
from mixscape.score import Response, report_to_obj, score, synthetic_responder

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, os.pardir, "test", "fixtures")

TEMPLATES = ["rw-focused", "vr-focused", "fully-mixed"]
CONDITIONS = ["ft", "nc", "ss"]
N_CASES = 50
MASTER_SEED = 20260817


def scoring_case(i: int) -> dict:
    template = TEMPLATES[i % 3]
    condition = CONDITIONS[i % len(CONDITIONS)]
    seed = 200 + i
    scene = generate_scene(template, seed)
    plan = build_plan(condition, scene)
    timeline = compile_directives(scene, plan).timeline

    rng = np.random.default_rng(np.random.SeedSequence([MASTER_SEED, i]))
    if i == 48:
        presses = []  # nobody pressed anything
    elif i == 49:
        presses = [Response(time=float(t), key=9) for t in rng.uniform(0, 60, 12)]
    else:
        presses = synthetic_responder(
            timeline,
            delay_mean=float(rng.uniform(0.3, 2.4)),
            delay_jitter=float(rng.uniform(0.0, 0.9)),
            miss_prob=[0.0, 0.0, 0.15, 0.4][i % 4],
            seed=seed,
        )
        # stray presses: wrong keys, out-of-window times, doubled taps
        for t in rng.uniform(0.0, scene.duration + 8.0, int(rng.integers(0, 8))):
            presses.append(Response(time=float(t), key=int(rng.integers(0, 7))))
        for p in list(presses)[:: max(1, len(presses) // 3)]:
            presses.append(Response(time=p.time + float(rng.uniform(0.0, 0.3)), key=p.key))
        order = rng.permutation(len(presses))
        presses = [presses[k] for k in order]

    report = score(timeline, presses)
    return {
        "name": f"{template}-{seed}-{condition}",
        "window": 5.0,
        "timeline": timeline_to_obj(timeline),
        "presses": [{"time": p.time, "key": p.key} for p in presses],
        "expected": report_to_obj(report),
    }


def write_scoring() -> None:
    doc = {
        "schema_version": 1,
        "kind": "scoring-fixtures",
        "cases": [scoring_case(i) for i in range(N_CASES)],
    }
    path = os.path.join(OUT, "scoring.json")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, sort_keys=True, separators=(",", ":"))
        f.write("\n")
    print(f"wrote {path} ({len(doc['cases'])} cases)")


def demo_scene() -> Scene:
    """Two seconds, one event per key: big enough to exercise the loader
    and practice plan, small enough to commit the rendered audio."""
    rw = SoundCategory.REAL_WORLD
    vr = SoundCategory.VIRTUAL
    sources = (
        SoundSource("speech", "speech@0.5", rw, Spatial(Vec3(0.0, 0.0, 2.0)), 1),
        SoundSource("knock", "knock@0.4", vr, EarChannel(Ear.BOTH), 2),
        SoundSource("tap", "tap@0.1", rw, Spatial(Vec3(1.5, 0.0, 1.5)), 3),
        SoundSource("ping", "ringtone@0.4", vr, EarChannel(Ear.RIGHT), 4),
    )
    events = (
        SoundEvent("speech", 0.10, 0.5),
        SoundEvent("knock", 0.70, 0.4),
        SoundEvent("tap", 1.20, 0.1),
        SoundEvent("ping", 1.50, 0.4),
    )
    listener = ListenerPath((Waypoint(0.0, Vec3(0.0, 0.0, 0.0), 0.0),))
    return Scene(
        id="demo-7",
        duration=2.0,
        seed=7,
        sources=sources,
        ambient_beds=(),
        events=events,
        listener=listener,
    )


def write_demo_bundle() -> None:
    scene = demo_scene()
    plan = build_plan("ft", scene)
    result = render(scene, plan, ClipBank(scene.seed))
    write_wav(os.path.join(OUT, "demo.wav"), result.pcm)
    save_timeline(result.timeline, os.path.join(OUT, "demo.timeline.json"))
    print(f"wrote demo.wav ({result.report['n_samples']} frames) + demo.timeline.json")


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    write_scoring()
    write_demo_bundle()
