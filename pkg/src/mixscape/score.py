"""Identification-task scoring.

A response log is a list of timed key presses. A press identifies an
event when it lands inside the event's response window and carries the
event's key. Presses are consumed in time order and each takes the
earliest still-unmatched event it can; with one window length for all
events this greedy matching maximizes the number of matches. Extra or
wrong-key presses never reduce the success rate.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .model import Timeline, TimelineEntry

RESPONSE_WINDOW = 5.0
MIN_REACTION = 0.05


@dataclass(frozen=True)
class Response:
    time: float
    key: int


@dataclass(frozen=True)
class Match:
    event_id: str
    key: int
    event_onset: float
    press_time: float

    @property
    def delay(self) -> float:
        return self.press_time - self.event_onset


@dataclass(frozen=True)
class KeyMetrics:
    events: int
    matched: int
    success_rate: float | None
    mean_delay: float | None


@dataclass(frozen=True)
class MetricsReport:
    total_events: int
    matched_events: int
    success_rate: float | None
    mean_delay: float | None
    per_key: dict[int, KeyMetrics]
    matches: tuple[Match, ...]
    unmatched_presses: int
    rejected_presses: int


def score(timeline: Timeline, responses: list[Response], window: float = RESPONSE_WINDOW) -> MetricsReport:
    events = sorted(timeline.identifiable(), key=lambda e: (e.actual_onset, e.event_id))
    matched: dict[str, Match] = {}
    unmatched = 0
    rejected = 0

    for press in sorted(responses, key=lambda r: r.time):
        if press.key not in (1, 2, 3, 4):
            rejected += 1
            continue
        hit = None
        for ev in events:
            if ev.event_id in matched or ev.identification_key != press.key:
                continue
            if ev.actual_onset <= press.time <= ev.actual_onset + window:
                hit = ev
                break
            if ev.actual_onset > press.time:
                break  # events are onset-sorted; later ones start even later
        if hit is None:
            unmatched += 1
        else:
            matched[hit.event_id] = Match(hit.event_id, press.key, hit.actual_onset, press.time)

    def summarize(evs: list[TimelineEntry]) -> tuple[int, int, float | None, float | None]:
        n = len(evs)
        got = [matched[e.event_id] for e in evs if e.event_id in matched]
        rate = len(got) / n if n else None
        delay = sum(m.delay for m in got) / len(got) if got else None
        return n, len(got), rate, delay

    total, got, rate, delay = summarize(events)
    per_key = {}
    for key in (1, 2, 3, 4):
        evs = [e for e in events if e.identification_key == key]
        if evs:
            per_key[key] = KeyMetrics(*summarize(evs))

    ordered = tuple(sorted(matched.values(), key=lambda m: (m.press_time, m.event_id)))
    return MetricsReport(
        total_events=total,
        matched_events=got,
        success_rate=rate,
        mean_delay=delay,
        per_key=per_key,
        matches=ordered,
        unmatched_presses=unmatched,
        rejected_presses=rejected,
    )


def report_to_obj(report: MetricsReport) -> dict:
    return {
        "total_events": report.total_events,
        "matched_events": report.matched_events,
        "success_rate": report.success_rate,
        "mean_delay": report.mean_delay,
        "per_key": {
            str(k): {
                "events": km.events,
                "matched": km.matched,
                "success_rate": km.success_rate,
                "mean_delay": km.mean_delay,
            }
            for k, km in sorted(report.per_key.items())
        },
        "matches": [
            {
                "event_id": m.event_id,
                "key": m.key,
                "event_onset": m.event_onset,
                "press_time": m.press_time,
                "delay": m.delay,
            }
            for m in report.matches
        ],
        "unmatched_presses": report.unmatched_presses,
        "rejected_presses": report.rejected_presses,
    }


def synthetic_responder(
    timeline: Timeline,
    delay_mean: float = 1.5,
    delay_jitter: float = 0.4,
    miss_prob: float = 0.0,
    seed: int = 0,
) -> list[Response]:
    """A simulated participant: one press per identifiable event, normally
    jittered around delay_mean, never faster than MIN_REACTION, missing
    each event with miss_prob."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5C0]))
    presses = []
    for ev in sorted(timeline.identifiable(), key=lambda e: (e.actual_onset, e.event_id)):
        if miss_prob > 0.0 and rng.random() < miss_prob:
            continue
        delay = max(MIN_REACTION, delay_mean + delay_jitter * rng.standard_normal())
        presses.append(Response(time=ev.actual_onset + delay, key=ev.identification_key))
    return sorted(presses, key=lambda r: r.time)


def load_responses(path: str) -> list[Response]:
    """Presses from .json (array of objects), .jsonl, or .csv with a
    time,key header."""
    if path.endswith(".csv"):
        out = []
        with open(path, newline="", encoding="utf-8") as f:
            for row in csv.DictReader(f):
                out.append(Response(time=float(row["time"]), key=int(row["key"])))
        return out
    with open(path, encoding="utf-8") as f:
        if path.endswith(".jsonl"):
            rows = [json.loads(line) for line in f if line.strip()]
        else:
            rows = json.load(f)
    if not isinstance(rows, list):
        raise ValueError(f"{path}: expected an array of presses")
    return [Response(time=float(r["time"]), key=int(r["key"])) for r in rows]


def save_responses(responses: list[Response], path: str) -> None:
    rows = [{"time": r.time, "key": r.key} for r in responses]
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(rows, indent=2) + "\n")
