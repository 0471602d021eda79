"""Command-line front end.

Exit codes: 0 on success, 1 on validation or runtime failure, 2 on usage
errors (argparse's default).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import assets, plans, render, sceneio, score
from .model import InvariantError, ManipulationPlan, Scene, SchemaError
from .scheduler import TEMPLATE_NAMES, ScenarioTemplate, generate_scene


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _load_scene_arg(args) -> Scene:
    if args.scene:
        return sceneio.load_scene(args.scene)
    if args.scenario is None:
        raise ValueError("pass --scene FILE or --scenario NAME with --seed")
    template = ScenarioTemplate(args.scenario, duration=args.duration)
    return generate_scene(template, args.seed)


def _resolve_plan(args, scene: Scene) -> ManipulationPlan:
    if args.plan:
        return sceneio.load_plan(args.plan)
    if args.condition:
        return plans.build_plan(args.condition, scene)
    raise ValueError("pass --condition ft|nc|ss or --plan FILE")


def cmd_generate(args) -> int:
    template = ScenarioTemplate(args.scenario, duration=args.duration)
    scene = generate_scene(template, args.seed)
    sceneio.save_scene(scene, args.output)
    print(f"wrote {args.output}: {len(scene.events)} events, {scene.duration:g}s")
    return 0


def cmd_plan(args) -> int:
    scene = _load_scene_arg(args)
    plan = plans.build_plan(args.condition, scene)
    sceneio.save_plan(plan, args.output)
    print(f"wrote {args.output}")
    return 0


def cmd_render(args) -> int:
    scene = _load_scene_arg(args)
    plan = _resolve_plan(args, scene)
    bank_seed = args.bank_seed if args.bank_seed is not None else scene.seed
    bank = assets.ClipBank(bank_seed, assets_dir=args.assets)
    result = render.render(scene, plan, bank)
    render.write_wav(args.output, result.pcm)
    if args.timeline:
        sceneio.save_timeline(result.timeline, args.timeline)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            f.write(json.dumps(result.report, sort_keys=True, indent=2) + "\n")
    print(
        f"wrote {args.output}: {result.report['n_samples']} frames, "
        f"{result.report['events_rendered']} events, "
        f"{result.report['events_dropped']} dropped, "
        f"{result.report['clipped_samples']} clipped samples"
    )
    return 0


def cmd_score(args) -> int:
    timeline = sceneio.load_timeline(args.timeline)
    responses = score.load_responses(args.responses)
    report = score.score(timeline, responses, window=args.window)
    obj = score.report_to_obj(report)
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_respond(args) -> int:
    timeline = sceneio.load_timeline(args.timeline)
    responses = score.synthetic_responder(
        timeline,
        delay_mean=args.delay_mean,
        delay_jitter=args.jitter,
        miss_prob=args.miss,
        seed=args.seed,
    )
    score.save_responses(responses, args.output)
    print(f"wrote {args.output}: {len(responses)} presses")
    return 0


def cmd_validate(args) -> int:
    failures = 0
    for path in args.files:
        try:
            with open(path, encoding="utf-8") as f:
                obj = json.load(f)
        except (OSError, json.JSONDecodeError) as err:
            print(f"{path}: INVALID ({err})")
            failures += 1
            continue
        kind = obj.get("kind") if isinstance(obj, dict) else None
        try:
            if kind == "scene":
                sceneio.load_scene(path)
            elif kind == "plan":
                sceneio.load_plan(path)
            elif kind == "timeline":
                sceneio.load_timeline(path)
            else:
                raise SchemaError("$.kind", f"unknown document kind {kind!r}")
        except (SchemaError, InvariantError) as err:
            print(f"{path}: INVALID ({err})")
            failures += 1
            continue
        print(f"{path}: OK ({kind})")
    return 1 if failures else 0


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def cmd_batch(args) -> int:
    scenarios = TEMPLATE_NAMES if args.scenario == "all" else (args.scenario,)
    conditions = args.conditions.split(",")
    for c in conditions:
        if c not in plans.CONDITIONS:
            raise ValueError(f"unknown condition {c!r}")
    seeds = [int(s) for s in args.seeds.split(",")]
    manifest: dict[str, str] = {}
    for scenario in scenarios:
        for seed in seeds:
            scene = generate_scene(ScenarioTemplate(scenario), seed)
            sub = os.path.join(args.output, f"{scenario}_{seed}")
            os.makedirs(sub, exist_ok=True)
            scene_path = os.path.join(sub, "scene.json")
            sceneio.save_scene(scene, scene_path)
            manifest[os.path.relpath(scene_path, args.output)] = _sha256(scene_path)
            bank = assets.ClipBank(scene.seed, assets_dir=args.assets)
            for condition in conditions:
                plan = plans.build_plan(condition, scene)
                result = render.render(scene, plan, bank)
                base = os.path.join(sub, condition)
                render.write_wav(base + ".wav", result.pcm)
                sceneio.save_timeline(result.timeline, base + ".timeline.json")
                with open(base + ".report.json", "w", encoding="utf-8") as f:
                    f.write(json.dumps(result.report, sort_keys=True, indent=2) + "\n")
                for ext in (".wav", ".timeline.json", ".report.json"):
                    rel = os.path.relpath(base + ext, args.output)
                    manifest[rel] = _sha256(base + ext)
            print(f"{scenario} seed {seed}: {len(conditions)} conditions")
    manifest_obj = {"schema_version": 1, "kind": "manifest", "files": manifest}
    with open(os.path.join(args.output, "manifest.json"), "w", encoding="utf-8") as f:
        f.write(json.dumps(manifest_obj, sort_keys=True, indent=2) + "\n")
    print(f"wrote {os.path.join(args.output, 'manifest.json')}: {len(manifest)} files")
    return 0


def cmd_assets(args) -> int:
    paths = assets.export_default_bank(args.output, args.seed)
    print(f"wrote {len(paths)} clips to {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixscape", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scene_args(p):
        p.add_argument("--scene", help="scene JSON file")
        p.add_argument("--scenario", choices=TEMPLATE_NAMES, help="built-in scenario template")
        p.add_argument("--seed", type=int, default=0, help="scenario seed (default 0)")
        p.add_argument("--duration", type=float, default=90.0, help="scene length in seconds")

    p = sub.add_parser("generate", help="write a scenario scene file")
    p.add_argument("--scenario", choices=TEMPLATE_NAMES, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=90.0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("plan", help="write a condition preset as a plan file")
    add_scene_args(p)
    p.add_argument("--condition", choices=plans.CONDITIONS, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("render", help="mix a scene under a plan into a WAV")
    add_scene_args(p)
    p.add_argument("--condition", choices=plans.CONDITIONS)
    p.add_argument("--plan", help="explicit plan JSON file")
    p.add_argument("--bank-seed", type=int, help="clip bank seed (default: scene seed)")
    p.add_argument("--assets", help="directory of replacement WAV clips")
    p.add_argument("-o", "--output", required=True, help="output WAV path")
    p.add_argument("--timeline", help="also write the event timeline JSON")
    p.add_argument("--report", help="also write the render report JSON")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("score", help="score a response log against a timeline")
    p.add_argument("--timeline", required=True)
    p.add_argument("--responses", required=True, help="presses as .json, .jsonl, or .csv")
    p.add_argument("--window", type=float, default=score.RESPONSE_WINDOW)
    p.add_argument("-o", "--output", help="write the metrics JSON here instead of stdout")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("respond", help="synthesize a response log for a timeline")
    p.add_argument("--timeline", required=True)
    p.add_argument("--delay-mean", type=float, default=1.5)
    p.add_argument("--jitter", type=float, default=0.4)
    p.add_argument("--miss", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_respond)

    p = sub.add_parser("validate", help="check scene/plan/timeline files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("batch", help="render scenario x condition x seed bundles")
    p.add_argument("--scenario", default="all", choices=TEMPLATE_NAMES + ("all",))
    p.add_argument("--conditions", default="ft,nc,ss", help="comma list of conditions")
    p.add_argument("--seeds", default="0", help="comma list of seeds")
    p.add_argument("--assets", help="directory of replacement WAV clips")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("assets", help="export the built-in clip bank as WAV files")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_assets)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, InvariantError, ValueError, KeyError, OSError) as err:
        return _fail(str(err))


if __name__ == "__main__":
    sys.exit(main())
