// Local re-implementation of the engine's identification scoring, working
// from the same Timeline JSON and press log the engine consumes. Matching
// policy, tie-breaks, and summation order are kept identical so both sides
// produce the same numbers on the same inputs.

import { Timeline, TimelineEntry, identifiable } from "./timeline.js";

export const RESPONSE_WINDOW = 5.0;

export interface Press {
  time: number;
  key: number;
}

export interface Match {
  eventId: string;
  key: number;
  eventOnset: number;
  pressTime: number;
  delay: number;
}

export interface KeyMetrics {
  events: number;
  matched: number;
  successRate: number | null;
  meanDelay: number | null;
}

export interface MetricsReport {
  totalEvents: number;
  matchedEvents: number;
  successRate: number | null;
  meanDelay: number | null;
  perKey: Map<number, KeyMetrics>;
  matches: Match[];
  unmatchedPresses: number;
  rejectedPresses: number;
}

function byOnsetThenId(a: TimelineEntry, b: TimelineEntry): number {
  if (a.actualOnset !== b.actualOnset) return a.actualOnset - b.actualOnset;
  return a.eventId < b.eventId ? -1 : a.eventId > b.eventId ? 1 : 0;
}

export function scoreTrial(
  timeline: Timeline,
  presses: Press[],
  window: number = RESPONSE_WINDOW,
): MetricsReport {
  const events = identifiable(timeline).sort(byOnsetThenId);
  const matched = new Map<string, Match>();
  let unmatched = 0;
  let rejected = 0;

  const ordered = [...presses].sort((a, b) => a.time - b.time);
  for (const press of ordered) {
    if (press.key !== 1 && press.key !== 2 && press.key !== 3 && press.key !== 4) {
      rejected += 1;
      continue;
    }
    let hit: TimelineEntry | null = null;
    for (const ev of events) {
      if (matched.has(ev.eventId) || ev.identificationKey !== press.key) continue;
      if (ev.actualOnset <= press.time && press.time <= ev.actualOnset + window) {
        hit = ev;
        break;
      }
      if (ev.actualOnset > press.time) break; // onset-sorted: later events start even later
    }
    if (hit === null) {
      unmatched += 1;
    } else {
      matched.set(hit.eventId, {
        eventId: hit.eventId,
        key: press.key,
        eventOnset: hit.actualOnset,
        pressTime: press.time,
        delay: press.time - hit.actualOnset,
      });
    }
  }

  function summarize(evs: TimelineEntry[]): KeyMetrics {
    const got: Match[] = [];
    for (const e of evs) {
      const m = matched.get(e.eventId);
      if (m) got.push(m);
    }
    const rate = evs.length ? got.length / evs.length : null;
    let delay: number | null = null;
    if (got.length) {
      let sum = 0;
      for (const m of got) sum += m.delay;
      delay = sum / got.length;
    }
    return { events: evs.length, matched: got.length, successRate: rate, meanDelay: delay };
  }

  const total = summarize(events);
  const perKey = new Map<number, KeyMetrics>();
  for (const key of [1, 2, 3, 4]) {
    const evs = events.filter((e) => e.identificationKey === key);
    if (evs.length) perKey.set(key, summarize(evs));
  }

  const matches = [...matched.values()].sort((a, b) => {
    if (a.pressTime !== b.pressTime) return a.pressTime - b.pressTime;
    return a.eventId < b.eventId ? -1 : a.eventId > b.eventId ? 1 : 0;
  });

  return {
    totalEvents: total.events,
    matchedEvents: total.matched,
    successRate: total.successRate,
    meanDelay: total.meanDelay,
    perKey,
    matches,
    unmatchedPresses: unmatched,
    rejectedPresses: rejected,
  };
}

/** Press log in the engine's response format: a JSON array of
 * {time, key} objects, ready for its score command. */
export function serializeResponses(presses: Press[]): string {
  const rows = presses.map((p) => ({ time: p.time, key: p.key }));
  return JSON.stringify(rows, null, 2) + "\n";
}
