import type { GraphView } from './graphview.js';

/**
 * Deterministic force-directed layout. Purely cosmetic: positions carry no
 * meaning and are not part of any acceptance check.
 */

export interface Point {
  x: number;
  y: number;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function forceLayout(
  view: GraphView,
  width: number,
  height: number,
  iterations = 120,
  seed = 1,
): Point[] {
  const n = view.vertices.length;
  const rand = mulberry32(seed);
  const points: Point[] = [];
  const radius = Math.min(width, height) * 0.35;
  for (let i = 0; i < n; i++) {
    const angle = (2 * Math.PI * i) / n + 0.05 * rand();
    points.push({
      x: width / 2 + radius * Math.cos(angle),
      y: height / 2 + radius * Math.sin(angle),
    });
  }
  const ideal = radius * 1.1;
  for (let step = 0; step < iterations; step++) {
    const cooling = 1 - step / iterations;
    const disp = points.map(() => ({ x: 0, y: 0 }));
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = points[i].x - points[j].x;
        const dy = points[i].y - points[j].y;
        const dist = Math.max(Math.hypot(dx, dy), 1e-6);
        const force = (ideal * ideal) / dist / dist;
        disp[i].x += dx * force;
        disp[i].y += dy * force;
        disp[j].x -= dx * force;
        disp[j].y -= dy * force;
      }
    }
    for (const edge of view.edges) {
      const a = points[edge.source];
      const b = points[edge.target];
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const dist = Math.max(Math.hypot(dx, dy), 1e-6);
      const pull = (dist - ideal) * 0.002;
      disp[edge.source].x += dx * pull;
      disp[edge.source].y += dy * pull;
      disp[edge.target].x -= dx * pull;
      disp[edge.target].y -= dy * pull;
    }
    for (let i = 0; i < n; i++) {
      points[i].x += disp[i].x * cooling;
      points[i].y += disp[i].y * cooling;
      points[i].x = Math.min(width - 40, Math.max(40, points[i].x));
      points[i].y = Math.min(height - 30, Math.max(30, points[i].y));
    }
  }
  return points;
}
