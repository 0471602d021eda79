import { describe, expect, it } from "vitest";

import { TrialSession, practicePlan } from "../src/session.js";
import { parseTimeline } from "../src/timeline.js";
import { fixtureText, mulberry32 } from "./util.js";

/** Clock that only updates every `step` seconds, like a media element's
 * currentTime polled between update ticks. */
function granularClock(step: number) {
  let t = 0;
  return {
    now: () => Math.floor(t / step) * step,
    advanceTo: (real: number) => {
      t = real;
    },
  };
}

describe("trial session capture", () => {
  it("stamps presses with the audio clock", () => {
    const clock = granularClock(0.001);
    const session = new TrialSession(clock.now);
    session.start();
    clock.advanceTo(1.5);
    session.keyDown(2);
    clock.advanceTo(3.25);
    session.keyDown(4);
    expect(session.toLog()).toEqual([
      { time: 1.5, key: 2 },
      { time: 3.25, key: 4 },
    ]);
  });

  it("no keys pressed gives an empty log", () => {
    const session = new TrialSession(() => 0);
    session.start();
    session.stop();
    expect(session.toLog()).toEqual([]);
    expect(session.discarded).toBe(0);
  });

  it("a press before start is discarded, not logged", () => {
    const session = new TrialSession(() => 0.8);
    expect(session.keyDown(1)).toBeNull();
    session.start();
    expect(session.discarded).toBe(1);
    expect(session.toLog()).toEqual([]);
  });

  it("a paused session records nothing", () => {
    const clock = granularClock(0.001);
    const session = new TrialSession(clock.now);
    session.start();
    clock.advanceTo(1.0);
    session.keyDown(1);
    session.pause();
    clock.advanceTo(2.0);
    expect(session.keyDown(2)).toBeNull();
    session.start();
    clock.advanceTo(3.0);
    session.keyDown(3);
    expect(session.toLog().map((p) => p.key)).toEqual([1, 3]);
    expect(session.discarded).toBe(1);
  });

  it("a stopped session stays stopped", () => {
    const session = new TrialSession(() => 1.0);
    session.start();
    session.stop();
    session.start(); // too late, the trial is over
    expect(session.keyDown(1)).toBeNull();
    expect(session.isRunning).toBe(false);
    expect(session.discarded).toBe(1);
  });

  it("non-trial keys are ignored without counting", () => {
    const session = new TrialSession(() => 1.0);
    session.start();
    expect(session.keyDown(7)).toBeNull();
    expect(session.keyDown(0)).toBeNull();
    expect(session.keyDown(NaN)).toBeNull();
    expect(session.toLog()).toEqual([]);
    expect(session.discarded).toBe(0);
  });

  it("log comes back in time order", () => {
    let t = 0;
    const session = new TrialSession(() => t);
    session.start();
    for (const at of [4.0, 1.0, 3.0, 2.0]) {
      t = at;
      session.keyDown(1);
    }
    expect(session.toLog().map((p) => p.time)).toEqual([1.0, 2.0, 3.0, 4.0]);
  });
});

describe("injected keypress timing", () => {
  it("recovers injection times within 30 ms on a coarse clock", () => {
    const rng = mulberry32(0xbeef);
    for (let round = 0; round < 200; round++) {
      const step = 0.005 + rng() * 0.02; // 5-25 ms clock granularity
      const clock = granularClock(step);
      const session = new TrialSession(clock.now);
      session.start();
      let t = 0;
      const injected: number[] = [];
      for (let i = 0; i < 12; i++) {
        t += 0.2 + rng() * 2.0;
        clock.advanceTo(t);
        session.keyDown(1 + (i % 4));
        injected.push(t);
      }
      const log = session.toLog();
      expect(log.length).toBe(injected.length);
      for (let i = 0; i < log.length; i++) {
        expect(Math.abs(log[i].time - injected[i])).toBeLessThanOrEqual(0.030);
      }
    }
  });
});

describe("practice plan", () => {
  const timeline = parseTimeline(fixtureText("demo.timeline.json"));

  it("plays each key's sound once, in key order", () => {
    const plan = practicePlan(timeline);
    expect(plan.map((p) => p.key)).toEqual([1, 2, 3, 4]);
    expect(plan.map((p) => p.source)).toEqual(["speech", "knock", "tap", "ping"]);
    for (const item of plan) {
      expect(item.stop).toBeGreaterThan(item.start);
      expect(item.stop - item.start).toBeLessThanOrEqual(2.0);
    }
  });

  it("clips long sounds to the practice length", () => {
    const doc = JSON.parse(fixtureText("demo.timeline.json"));
    doc.entries[0].duration = 10.0;
    const plan = practicePlan(parseTimeline(JSON.stringify(doc)));
    expect(plan[0].stop - plan[0].start).toBeCloseTo(2.0, 12);
  });

  it("uses the earliest event of each key", () => {
    const doc = JSON.parse(fixtureText("demo.timeline.json"));
    const extra = { ...doc.entries[0], event_id: "e990", actual_onset: 0.01, scheduled_onset: 0.01 };
    doc.entries.push(extra);
    const plan = practicePlan(parseTimeline(JSON.stringify(doc)));
    expect(plan[0].start).toBeCloseTo(0.01, 12);
  });
});
