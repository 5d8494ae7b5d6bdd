import { ApiClient } from './api.js';
import { buildAttributionBars } from './bars.js';
import { WhatIfController, type ViewState } from './controller.js';
import { collectEdits } from './editor.js';
import { buildGraphView, influenceRow, type GraphView } from './graphview.js';
import { forceLayout } from './layout.js';
import { describeEdits } from './timeline.js';
import type { CatalogResponse, EditValue, FeatureSpec } from './types.js';

const API_BASE = (window as { PEERINFLUENCE_API?: string }).PEERINFLUENCE_API ?? 'http://127.0.0.1:8000';
const SVG_NS = 'http://www.w3.org/2000/svg';

const api = new ApiClient(API_BASE);
let catalog: CatalogResponse | null = null;
let features: FeatureSpec[] = [];
let editorValues: Record<string, string> = {};
let fieldErrors: Record<string, string> = {};
let selectedVertex: number | null = null;

const controller = new WhatIfController(api, render);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderEditor(state: ViewState): HTMLElement {
  const panel = el('section', 'panel editor');
  panel.appendChild(el('h2', undefined, 'Instance editor'));
  const form = el('div', 'editor-grid');
  for (const feature of features) {
    const row = el('label', 'editor-row');
    const caption = feature.unit ? `${feature.name} (${feature.unit})` : feature.name;
    row.appendChild(el('span', 'editor-name', caption));

    let input: HTMLInputElement | HTMLSelectElement;
    if (feature.kind === 'categorical') {
      const select = document.createElement('select');
      for (const category of feature.categories ?? []) {
        const option = document.createElement('option');
        option.value = category;
        option.textContent = category;
        select.appendChild(option);
      }
      select.value = editorValues[feature.name] ?? '';
      input = select;
    } else {
      const text = document.createElement('input');
      text.type = 'text';
      text.value = editorValues[feature.name] ?? '';
      input = text;
    }
    input.addEventListener('input', () => {
      editorValues[feature.name] = input.value;
      render(controller.state);
    });
    row.appendChild(input);

    const suggested = controller.suggestedInterventions();
    if (state.piDocument && suggested.has(feature.name)) {
      row.appendChild(el('span', 'suggestion', 'suggested'));
    }
    const error = fieldErrors[feature.name];
    if (error) row.appendChild(el('span', 'field-error', error));
    form.appendChild(row);
  }
  panel.appendChild(form);

  const { edits, errors } = collectEdits(features, state.instance, editorValues);
  fieldErrors = errors;
  const apply = el('button', 'apply', state.session ? 'Apply edits' : 'Start session');
  apply.disabled =
    state.pending ||
    Object.keys(errors).length > 0 ||
    (state.session !== null && Object.keys(edits).length === 0);
  apply.addEventListener('click', () => {
    void onApply();
  });
  panel.appendChild(apply);
  if (state.pending) panel.appendChild(el('span', 'pending', 'working…'));
  return panel;
}

async function onApply(): Promise<void> {
  const state = controller.state;
  const { edits, errors } = collectEdits(features, state.instance, editorValues);
  if (Object.keys(errors).length > 0) {
    render(state);
    return;
  }
  if (state.session === null) {
    const instance: Record<string, EditValue> = {};
    for (const feature of features) {
      const raw = editorValues[feature.name] ?? '';
      instance[feature.name] = feature.kind === 'categorical' ? raw : Number(raw);
    }
    const datasetId = Object.keys(catalog?.datasets ?? {})[0];
    const modelId = Object.keys(catalog?.models ?? {})[0];
    await controller.start(datasetId, modelId, features, instance);
  } else {
    await controller.applyEdits(edits);
  }
}

function renderPrediction(state: ViewState): HTMLElement {
  const panel = el('section', 'panel prediction');
  panel.appendChild(el('h2', undefined, 'Prediction'));
  if (state.prediction === null) {
    panel.appendChild(el('p', 'placeholder', 'no session yet'));
    return panel;
  }
  const badge = el('div', `badge badge-${state.prediction}`, `class ${state.prediction}`);
  badge.id = 'prediction-badge';
  panel.appendChild(badge);
  panel.appendChild(el('p', 'score', `raw score ${state.score?.toFixed(4)}`));
  return panel;
}

function renderBars(state: ViewState): HTMLElement {
  const panel = el('section', 'panel bars');
  panel.appendChild(el('h2', undefined, 'Attribution'));
  if (!state.attribution) {
    panel.appendChild(el('p', 'placeholder', 'attribution appears after the first run'));
    return panel;
  }
  for (const bar of buildAttributionBars(state.attribution)) {
    const row = el('div', 'bar-row');
    row.appendChild(el('span', 'bar-name', bar.name));
    const track = el('div', 'bar-track');
    const fill = el('div', `bar-fill bar-${bar.color}`);
    fill.style.width = `${bar.widthPct}%`;
    track.appendChild(fill);
    row.appendChild(track);
    row.appendChild(el('span', 'bar-value', bar.label));
    panel.appendChild(row);
  }
  return panel;
}

function renderGraph(state: ViewState): HTMLElement {
  const panel = el('section', 'panel graph');
  panel.appendChild(el('h2', undefined, 'Peer influence'));
  if (!state.piDocument) {
    panel.appendChild(el('p', 'placeholder', 'influence graph appears after the first run'));
    return panel;
  }
  let view: GraphView;
  try {
    view = buildGraphView(state.piDocument);
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    panel.appendChild(el('p', 'error-panel', `cannot render document: ${message}`));
    return panel;
  }

  const width = 560;
  const height = 380;
  const positions = forceLayout(view, width, height);
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', `0 0 ${width} ${height}`);
  svg.setAttribute('class', 'graph-svg');

  const highlighted = selectedVertex === null ? null : new Set(
    influenceRow(view, selectedVertex).map((e) => `${e.source}-${e.target}`),
  );
  for (const edge of view.edges) {
    const a = positions[edge.source];
    const b = positions[edge.target];
    const line = document.createElementNS(SVG_NS, 'line');
    line.setAttribute('x1', a.x.toFixed(1));
    line.setAttribute('y1', a.y.toFixed(1));
    line.setAttribute('x2', b.x.toFixed(1));
    line.setAttribute('y2', b.y.toFixed(1));
    const key = `${edge.source}-${edge.target}`;
    const dim = highlighted !== null && !highlighted.has(key);
    line.setAttribute('stroke', edge.color);
    line.setAttribute('stroke-opacity', dim ? '0.08' : '0.55');
    const title = document.createElementNS(SVG_NS, 'title');
    title.textContent = edge.tooltip;
    line.appendChild(title);
    svg.appendChild(line);
  }
  view.vertices.forEach((vertex, i) => {
    const group = document.createElementNS(SVG_NS, 'g');
    const circle = document.createElementNS(SVG_NS, 'circle');
    circle.setAttribute('cx', positions[i].x.toFixed(1));
    circle.setAttribute('cy', positions[i].y.toFixed(1));
    circle.setAttribute('r', selectedVertex === i ? '11' : '8');
    circle.setAttribute('fill', vertex.color);
    circle.addEventListener('click', () => {
      selectedVertex = selectedVertex === i ? null : i;
      render(controller.state);
    });
    const title = document.createElementNS(SVG_NS, 'title');
    title.textContent = vertex.name;
    circle.appendChild(title);
    group.appendChild(circle);
    const label = document.createElementNS(SVG_NS, 'text');
    label.setAttribute('x', (positions[i].x + 12).toFixed(1));
    label.setAttribute('y', (positions[i].y + 4).toFixed(1));
    label.textContent = vertex.name;
    group.appendChild(label);
    svg.appendChild(group);
  });
  panel.appendChild(svg);
  panel.appendChild(
    el('p', 'hint', 'click a vertex to highlight its influence row; hover an edge for its weight'),
  );
  return panel;
}

function renderRecommendations(state: ViewState): HTMLElement {
  const panel = el('section', 'panel recommend');
  panel.appendChild(el('h2', undefined, 'Intervention recommendation'));
  if (!state.piDocument) {
    panel.appendChild(el('p', 'placeholder', 'run the influence analysis first'));
    return panel;
  }
  const doc = state.piDocument;
  const table = el('table', 'alteration-table');
  const head = el('tr');
  for (const caption of ['feature', 'ALT row sum', 'CALT row sum', 'recommended']) {
    head.appendChild(el('th', undefined, caption));
  }
  table.appendChild(head);
  doc.feature_names.forEach((name, i) => {
    const row = el('tr');
    row.appendChild(el('td', undefined, name));
    row.appendChild(el('td', undefined, doc.alt.row_sums[i].toFixed(2)));
    row.appendChild(el('td', undefined, doc.calt.row_sums[i].toFixed(0)));
    const marks: string[] = [];
    if (doc.alt.selected.includes(name)) marks.push('ALT');
    if (doc.calt.selected.includes(name)) marks.push('CALT');
    row.appendChild(el('td', marks.length ? 'selected-mark' : undefined, marks.join(' + ')));
    table.appendChild(row);
  });
  panel.appendChild(table);

  const controls = el('div', 'policy-controls');
  const label = el('label', undefined, 'zero policy ');
  const select = document.createElement('select');
  for (const policy of ['strict', 'inclusive']) {
    const option = document.createElement('option');
    option.value = policy;
    option.textContent = policy;
    select.appendChild(option);
  }
  select.value = state.zeroPolicy;
  select.addEventListener('change', () => {
    void controller.setZeroPolicy(select.value as 'strict' | 'inclusive');
  });
  label.appendChild(select);
  controls.appendChild(label);

  const togglesCaption = el('span', undefined, ' controllable: ');
  controls.appendChild(togglesCaption);
  for (const feature of features) {
    const toggle = el('label', 'controllable-toggle');
    const checkbox = document.createElement('input');
    checkbox.type = 'checkbox';
    checkbox.checked = Boolean(state.controllable[feature.name]);
    checkbox.addEventListener('change', () => {
      controller.toggleControllable(feature.name);
      void controller.refreshInfluence();
    });
    toggle.appendChild(checkbox);
    toggle.appendChild(document.createTextNode(feature.name));
    controls.appendChild(toggle);
  }
  panel.appendChild(controls);
  return panel;
}

function renderTimeline(state: ViewState): HTMLElement {
  const panel = el('section', 'panel timeline');
  panel.appendChild(el('h2', undefined, 'Timeline'));
  if (state.timeline.length === 0) {
    panel.appendChild(el('p', 'placeholder', 'no interventions applied yet'));
  }
  const list = el('ol');
  for (const entry of state.timeline) {
    list.appendChild(
      el('li', undefined, `${describeEdits(entry.edits)} ⇒ class ${entry.prediction}`),
    );
  }
  panel.appendChild(list);
  if (state.session) {
    const verify = el('button', undefined, 'Verify against history');
    verify.addEventListener('click', async () => {
      const replayed = await controller.replayFromHistory();
      const note = replayed === state.prediction ? 'history matches' : 'HISTORY MISMATCH';
      panel.appendChild(el('p', 'hint', `replayed class ${replayed}: ${note}`));
    });
    panel.appendChild(verify);
  }
  return panel;
}

function render(state: ViewState): void {
  const root = document.getElementById('app');
  if (!root) return;
  root.replaceChildren();
  root.appendChild(el('h1', undefined, 'Peer-influence what-if console'));
  if (state.error) root.appendChild(el('div', 'error-banner', state.error));
  const grid = el('div', 'grid');
  grid.appendChild(renderEditor(state));
  grid.appendChild(renderPrediction(state));
  grid.appendChild(renderBars(state));
  grid.appendChild(renderGraph(state));
  grid.appendChild(renderRecommendations(state));
  grid.appendChild(renderTimeline(state));
  root.appendChild(grid);
}

async function boot(): Promise<void> {
  try {
    catalog = await api.catalog();
    const first = Object.values(catalog.datasets)[0];
    features = first ? first.features : [];
    editorValues = {};
    for (const feature of features) {
      editorValues[feature.name] =
        feature.kind === 'categorical' ? (feature.categories?.[0] ?? '') : '0';
    }
    render(controller.state);
  } catch (err) {
    const root = document.getElementById('app');
    if (root) {
      root.replaceChildren(
        el('div', 'error-banner', `cannot reach the service at ${API_BASE}: ${String(err)}`),
      );
    }
  }
}

void boot();
