import type { EditValue, HistoryEntry } from './types.js';

export interface TimelineEntry {
  step: number;
  edits: Record<string, EditValue>;
  prediction: number;
  score: number;
}

export function appendEntry(
  timeline: TimelineEntry[],
  edits: Record<string, EditValue>,
  prediction: number,
  score: number,
): TimelineEntry[] {
  return [...timeline, { step: timeline.length + 1, edits, prediction, score }];
}

/**
 * The prediction badge reconstructed from the service history: the last
 * entry wins, or the session's initial prediction when nothing happened.
 */
export function finalPrediction(
  entries: HistoryEntry[],
  initialPrediction: number,
): number {
  if (entries.length === 0) return initialPrediction;
  return entries[entries.length - 1].prediction;
}

export function describeEdits(edits: Record<string, EditValue>): string {
  const parts = Object.entries(edits).map(([name, value]) => `${name} → ${value}`);
  return parts.length ? parts.join(', ') : 'no changes';
}
