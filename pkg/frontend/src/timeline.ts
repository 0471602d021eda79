// Timeline JSON: the engine's per-event render record. The app never
// recomputes onsets; it trusts actual_onset as the moment the sound is
// audible in the WAV.

export const SCHEMA_VERSION = 1;

export type Category = "RealWorld" | "Virtual";

export interface TimelineEntry {
  eventId: string;
  source: string;
  identificationKey: number | null;
  category: Category;
  scheduledOnset: number;
  actualOnset: number;
  duration: number;
  appliedManipulations: string[];
  dropped: boolean;
}

export interface Timeline {
  schemaVersion: number;
  entries: TimelineEntry[];
}

export class TimelineError extends Error {}

function num(obj: Record<string, unknown>, key: string, where: string): number {
  const v = obj[key];
  if (typeof v !== "number" || !isFinite(v)) {
    throw new TimelineError(`${where}: ${key} must be a finite number`);
  }
  return v;
}

function str(obj: Record<string, unknown>, key: string, where: string): string {
  const v = obj[key];
  if (typeof v !== "string") {
    throw new TimelineError(`${where}: ${key} must be a string`);
  }
  return v;
}

function entryFromJson(raw: unknown, i: number): TimelineEntry {
  const where = `entries[${i}]`;
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new TimelineError(`${where}: expected an object`);
  }
  const o = raw as Record<string, unknown>;
  const key = o["identification_key"];
  if (key !== null && typeof key !== "number") {
    throw new TimelineError(`${where}: identification_key must be a number or null`);
  }
  const category = str(o, "category", where);
  if (category !== "RealWorld" && category !== "Virtual") {
    throw new TimelineError(`${where}: unknown category ${JSON.stringify(category)}`);
  }
  const manips = o["applied_manipulations"];
  if (!Array.isArray(manips) || manips.some((m) => typeof m !== "string")) {
    throw new TimelineError(`${where}: applied_manipulations must be a string array`);
  }
  return {
    eventId: str(o, "event_id", where),
    source: str(o, "source", where),
    identificationKey: key as number | null,
    category,
    scheduledOnset: num(o, "scheduled_onset", where),
    actualOnset: num(o, "actual_onset", where),
    duration: num(o, "duration", where),
    appliedManipulations: manips as string[],
    dropped: o["dropped"] === true,
  };
}

export function parseTimeline(text: string): Timeline {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new TimelineError(`timeline is not valid JSON: ${err}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new TimelineError("timeline must be a JSON object");
  }
  const o = raw as Record<string, unknown>;
  if (o["kind"] !== "timeline") {
    throw new TimelineError(`expected kind "timeline", got ${JSON.stringify(o["kind"])}`);
  }
  if (o["schema_version"] !== SCHEMA_VERSION) {
    throw new TimelineError(
      `unsupported schema_version ${JSON.stringify(o["schema_version"])}; this app reads version ${SCHEMA_VERSION}`,
    );
  }
  const entries = o["entries"];
  if (!Array.isArray(entries)) {
    throw new TimelineError("entries must be an array");
  }
  return {
    schemaVersion: SCHEMA_VERSION,
    entries: entries.map(entryFromJson),
  };
}

/** Entries that count toward scoring: keyed and not dropped. */
export function identifiable(timeline: Timeline): TimelineEntry[] {
  return timeline.entries.filter((e) => e.identificationKey !== null && !e.dropped);
}

/** Last audible moment of the timeline; dropped entries never sound. */
export function timelineEnd(timeline: Timeline): number {
  let end = 0;
  for (const e of timeline.entries) {
    if (!e.dropped && e.actualOnset + e.duration > end) {
      end = e.actualOnset + e.duration;
    }
  }
  return end;
}

export interface LegendRow {
  key: number;
  sources: string[];
  categories: Category[];
}

/** One row per identification key present, ascending, with the source
 * names the key stands for. */
export function keyLegend(timeline: Timeline): LegendRow[] {
  const byKey = new Map<number, { sources: Set<string>; categories: Set<Category> }>();
  for (const e of identifiable(timeline)) {
    const key = e.identificationKey as number;
    let row = byKey.get(key);
    if (!row) {
      row = { sources: new Set(), categories: new Set() };
      byKey.set(key, row);
    }
    row.sources.add(e.source);
    row.categories.add(e.category);
  }
  return [...byKey.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([key, row]) => ({
      key,
      sources: [...row.sources].sort(),
      categories: [...row.categories].sort(),
    }));
}
