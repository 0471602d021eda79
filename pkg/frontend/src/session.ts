// Live-trial state: keypress capture stamped against the audio playback
// clock. The clock is injected as a function so tests can drive it and so
// the capture path never touches wall time; a paused player's clock stands
// still and a stopped session records nothing.

import { Press } from "./score.js";
import { Timeline, TimelineEntry, identifiable } from "./timeline.js";

/** Seconds into the audio, as reported by the player. */
export type AudioClock = () => number;

export const TRIAL_KEYS = [1, 2, 3, 4] as const;

export class TrialSession {
  private readonly clock: AudioClock;
  private readonly presses: Press[] = [];
  private running = false;
  private finished = false;

  /** Trial-key presses that arrived while capture was off. */
  discarded = 0;

  constructor(clock: AudioClock) {
    this.clock = clock;
  }

  get isRunning(): boolean {
    return this.running;
  }

  get pressCount(): number {
    return this.presses.length;
  }

  start(): void {
    if (!this.finished) this.running = true;
  }

  pause(): void {
    this.running = false;
  }

  stop(): void {
    this.running = false;
    this.finished = true;
  }

  /** Record a key if it is a trial key and capture is live. Returns the
   * stamped press, or null for anything ignored. */
  keyDown(key: number): Press | null {
    if (!TRIAL_KEYS.includes(key as (typeof TRIAL_KEYS)[number])) {
      return null; // not a trial key at all
    }
    if (!this.running) {
      this.discarded += 1;
      return null;
    }
    const press = { time: this.clock(), key };
    this.presses.push(press);
    return press;
  }

  /** Presses so far, in time order. */
  toLog(): Press[] {
    return [...this.presses].sort((a, b) => a.time - b.time);
  }
}

export interface PracticeItem {
  key: number;
  source: string;
  category: string;
  start: number;
  stop: number;
}

export const PRACTICE_CLIP_SECONDS = 2.0;

/** One warm-up clip per key: the first occurrence of each key's sound,
 * played in isolation by seeking the trial audio. Ascending key order. */
export function practicePlan(
  timeline: Timeline,
  clipSeconds: number = PRACTICE_CLIP_SECONDS,
): PracticeItem[] {
  const first = new Map<number, TimelineEntry>();
  for (const e of identifiable(timeline)) {
    const key = e.identificationKey as number;
    const seen = first.get(key);
    if (!seen || e.actualOnset < seen.actualOnset) first.set(key, e);
  }
  return [...first.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([key, e]) => ({
      key,
      source: e.source,
      category: e.category,
      start: e.actualOnset,
      stop: e.actualOnset + Math.min(e.duration, clipSeconds),
    }));
}
