import type { AttributionPayload } from './types.js';
import { OPPONENT_COLOR, PROPONENT_COLOR } from './graphview.js';

export interface BarView {
  name: string;
  phi: number;
  label: string;
  widthPct: number;
  color: typeof PROPONENT_COLOR | typeof OPPONENT_COLOR;
}

/** One signed bar per feature, sorted by |phi| descending. */
export function buildAttributionBars(attribution: AttributionPayload): BarView[] {
  const entries = Object.entries(attribution.phi);
  const maxAbs = entries.reduce((acc, [, v]) => Math.max(acc, Math.abs(v)), 0);
  return entries
    .map(
      ([name, phi]): BarView => ({
        name,
        phi,
        label: phi.toFixed(2),
        widthPct: maxAbs === 0 ? 0 : (100 * Math.abs(phi)) / maxAbs,
        color: phi >= 0 ? PROPONENT_COLOR : OPPONENT_COLOR,
      }),
    )
    .sort((a, b) => Math.abs(b.phi) - Math.abs(a.phi));
}
