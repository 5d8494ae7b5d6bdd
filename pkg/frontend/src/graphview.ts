import type { ResultDocument } from './types.js';

/** View model for the influence graph; all numbers are document passthrough. */

export const PROPONENT_COLOR = 'green';
export const OPPONENT_COLOR = 'red';

export interface VertexView {
  index: number;
  name: string;
  color: typeof PROPONENT_COLOR | typeof OPPONENT_COLOR;
}

export interface EdgeView {
  source: number;
  target: number;
  kind: 'support' | 'attack';
  color: typeof PROPONENT_COLOR | typeof OPPONENT_COLOR;
  weight: number;
  tooltip: string;
}

export interface GraphView {
  vertices: VertexView[];
  edges: EdgeView[];
}

export class GraphDocumentError extends Error {}

function checkDocument(doc: ResultDocument): void {
  if (!doc || !Array.isArray(doc.feature_names) || doc.feature_names.length < 2) {
    throw new GraphDocumentError('document has no feature names');
  }
  const m = doc.feature_names.length;
  if (doc.influence?.orientation !== 'rows-influence-columns') {
    throw new GraphDocumentError(
      `unexpected orientation tag: ${String(doc.influence?.orientation)}`,
    );
  }
  const matrix = doc.influence.matrix;
  if (!Array.isArray(matrix) || matrix.length !== m || matrix.some((r) => r.length !== m)) {
    throw new GraphDocumentError('influence matrix is not m-by-m');
  }
  if (!doc.graph || !Array.isArray(doc.graph.support_arcs) || !Array.isArray(doc.graph.attack_arcs)) {
    throw new GraphDocumentError('document graph section is missing arcs');
  }
}

export function buildGraphView(doc: ResultDocument): GraphView {
  checkDocument(doc);
  const names = doc.feature_names;
  const opponents = new Set(doc.graph.opponents);
  const vertices: VertexView[] = names.map((name, index) => ({
    index,
    name,
    color: opponents.has(name) ? OPPONENT_COLOR : PROPONENT_COLOR,
  }));

  const edges: EdgeView[] = [];
  const push = (pairs: [number, number][], kind: 'support' | 'attack') => {
    for (const [i, j] of pairs) {
      if (i < 0 || j < 0 || i >= names.length || j >= names.length) {
        throw new GraphDocumentError(`arc (${i}, ${j}) is out of range`);
      }
      const weight = doc.influence.matrix[i][j];
      edges.push({
        source: i,
        target: j,
        kind,
        color: kind === 'support' ? PROPONENT_COLOR : OPPONENT_COLOR,
        weight,
        tooltip: `${names[i]} → ${names[j]}: ${weight.toFixed(2)}`,
      });
    }
  };
  push(doc.graph.support_arcs, 'support');
  push(doc.graph.attack_arcs, 'attack');
  edges.sort((a, b) => a.source - b.source || a.target - b.target);
  return { vertices, edges };
}

/** Out-edges of one vertex: its influence row, used for hover highlighting. */
export function influenceRow(view: GraphView, vertex: number): EdgeView[] {
  return view.edges.filter((e) => e.source === vertex);
}
