import { describe, expect, it } from "vitest";

import { BundleError, DURATION_SLACK, idsFromName, loadBundle } from "../src/bundle.js";
import { keyLegend } from "../src/timeline.js";
import { fixtureBytes, fixtureText } from "./util.js";

const wav = () => fixtureBytes("demo.wav");
const timelineText = () => fixtureText("demo.timeline.json");

describe("loading an engine bundle", () => {
  it("accepts the rendered pair and derives a four-key legend", () => {
    const bundle = loadBundle({
      wav: wav(),
      timelineText: timelineText(),
      scenarioId: "demo-7",
      conditionId: "ft",
    });
    expect(bundle.audio.sampleRate).toBe(48000);
    expect(bundle.audio.channels).toBe(2);
    expect(bundle.audio.bitsPerSample).toBe(16);
    expect(bundle.audio.duration).toBeCloseTo(2.0, 9);
    const legend = keyLegend(bundle.timeline);
    expect(legend.map((r) => r.key)).toEqual([1, 2, 3, 4]);
    expect(legend[0].sources).toEqual(["speech"]);
    expect(legend[0].categories).toEqual(["RealWorld"]);
  });

  it("defaults missing ids to unknown", () => {
    const bundle = loadBundle({ wav: wav(), timelineText: timelineText() });
    expect(bundle.scenarioId).toBe("unknown");
    expect(bundle.conditionId).toBe("unknown");
  });

  it("rejects a timeline that outruns the audio, with a message", () => {
    const doc = JSON.parse(timelineText());
    doc.entries[0].duration = 5.0; // now ends at 5.1s in a 2.0s file
    const call = () =>
      loadBundle({ wav: wav(), timelineText: JSON.stringify(doc) });
    expect(call).toThrowError(BundleError);
    expect(call).toThrowError(/timeline runs to 5.100s but the audio is only 2.000s/);
  });

  it("allows the timeline to end inside the slack", () => {
    const doc = JSON.parse(timelineText());
    doc.entries[0].actual_onset = 2.0 + DURATION_SLACK - doc.entries[0].duration - 0.001;
    expect(() => loadBundle({ wav: wav(), timelineText: JSON.stringify(doc) })).not.toThrow();
  });

  it("ignores dropped entries when checking duration", () => {
    const doc = JSON.parse(timelineText());
    doc.entries[0].duration = 50.0;
    doc.entries[0].dropped = true;
    expect(() => loadBundle({ wav: wav(), timelineText: JSON.stringify(doc) })).not.toThrow();
  });

  it("rejects a missing timeline", () => {
    expect(() => loadBundle({ wav: wav(), timelineText: null })).toThrowError(
      /no timeline file selected/,
    );
  });

  it("rejects missing audio", () => {
    expect(() => loadBundle({ wav: null, timelineText: timelineText() })).toThrowError(
      /no audio file selected/,
    );
  });

  it("rejects a document of the wrong kind", () => {
    const call = () =>
      loadBundle({ wav: wav(), timelineText: '{"kind":"scene","schema_version":1}' });
    expect(call).toThrowError(BundleError);
    expect(call).toThrowError(/expected kind "timeline"/);
  });

  it("rejects an unsupported schema version", () => {
    const doc = JSON.parse(timelineText());
    doc.schema_version = 99;
    expect(() => loadBundle({ wav: wav(), timelineText: JSON.stringify(doc) })).toThrowError(
      /unsupported schema_version 99/,
    );
  });

  it("rejects a timeline with nothing to identify", () => {
    const doc = JSON.parse(timelineText());
    for (const e of doc.entries) e.identification_key = null;
    expect(() => loadBundle({ wav: wav(), timelineText: JSON.stringify(doc) })).toThrowError(
      /no identifiable events/,
    );
  });

  it("rejects malformed JSON with a parse message", () => {
    expect(() => loadBundle({ wav: wav(), timelineText: "{nope" })).toThrowError(
      /not valid JSON/,
    );
  });

  it("rejects garbage audio bytes", () => {
    const junk = new TextEncoder().encode("this is not a wav file at all, sorry ".repeat(4)).buffer;
    expect(() => loadBundle({ wav: junk as ArrayBuffer, timelineText: timelineText() })).toThrowError(
      /not a RIFF/,
    );
  });
});

describe("id guessing from file names", () => {
  it("reads scenario and condition from a combined name", () => {
    expect(idsFromName("rw-focused-1.ss.timeline.json")).toEqual({
      scenarioId: "rw-focused-1",
      conditionId: "ss",
    });
    expect(idsFromName("fully-mixed-12.nc.wav")).toEqual({
      scenarioId: "fully-mixed-12",
      conditionId: "nc",
    });
  });

  it("treats a bare condition name as condition only", () => {
    expect(idsFromName("ss.timeline.json")).toEqual({ scenarioId: null, conditionId: "ss" });
    expect(idsFromName("ft.wav")).toEqual({ scenarioId: null, conditionId: "ft" });
  });

  it("falls back to scenario-only for plain names", () => {
    expect(idsFromName("render.wav")).toEqual({ scenarioId: "render", conditionId: null });
  });

  it("strips directories", () => {
    expect(idsFromName("out/vr-focused-3.ft.timeline.json")).toEqual({
      scenarioId: "vr-focused-3",
      conditionId: "ft",
    });
  });
});
