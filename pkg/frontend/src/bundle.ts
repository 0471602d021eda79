// A trial bundle ties one rendered WAV to the timeline that describes it.
// Loading validates the pair before any audio plays, so a mismatched pick
// (wrong file, truncated audio, stale timeline) fails with a message
// instead of producing garbage scores.

import { Timeline, TimelineError, keyLegend, parseTimeline, timelineEnd } from "./timeline.js";
import { WavError, WavFormat, parseWav } from "./wav.js";

/** Timeline may outrun the audio by at most this much (encoder rounding). */
export const DURATION_SLACK = 0.1;

export class BundleError extends Error {}

export interface TrialBundle {
  scenarioId: string;
  conditionId: string;
  audio: WavFormat;
  timeline: Timeline;
}

export interface BundleFiles {
  wav: ArrayBuffer | null;
  timelineText: string | null;
  scenarioId?: string;
  conditionId?: string;
}

export function loadBundle(files: BundleFiles): TrialBundle {
  if (files.wav === null) {
    throw new BundleError("no audio file selected");
  }
  if (files.timelineText === null) {
    throw new BundleError("no timeline file selected");
  }
  let audio: WavFormat;
  let timeline: Timeline;
  try {
    audio = parseWav(files.wav);
  } catch (err) {
    if (err instanceof WavError) throw new BundleError(`audio: ${err.message}`);
    throw err;
  }
  try {
    timeline = parseTimeline(files.timelineText);
  } catch (err) {
    if (err instanceof TimelineError) throw new BundleError(`timeline: ${err.message}`);
    throw err;
  }
  const end = timelineEnd(timeline);
  if (end > audio.duration + DURATION_SLACK) {
    throw new BundleError(
      `timeline runs to ${end.toFixed(3)}s but the audio is only ` +
        `${audio.duration.toFixed(3)}s long; wrong file pair?`,
    );
  }
  if (keyLegend(timeline).length === 0) {
    throw new BundleError("timeline has no identifiable events; nothing to respond to");
  }
  return {
    scenarioId: files.scenarioId ?? "unknown",
    conditionId: files.conditionId ?? "unknown",
    audio,
    timeline,
  };
}

/** Best-effort scenario/condition guess from an output file name.
 * "rw-focused-7.ss.timeline.json" names both; batch output names only
 * the condition ("ss.timeline.json") and the directory holds the rest,
 * which a browser file picker does not reveal. */
export function idsFromName(name: string): { scenarioId: string | null; conditionId: string | null } {
  let stem = name.replace(/\.(timeline\.json|json|wav)$/, "");
  const slash = stem.lastIndexOf("/");
  if (slash >= 0) stem = stem.slice(slash + 1);
  const dot = stem.lastIndexOf(".");
  if (dot > 0) {
    return { scenarioId: stem.slice(0, dot), conditionId: stem.slice(dot + 1) };
  }
  if (stem === "ft" || stem === "nc" || stem === "ss") {
    return { scenarioId: null, conditionId: stem };
  }
  return { scenarioId: stem || null, conditionId: null };
}
