import { describe, expect, it } from 'vitest';

import { ApiClient, type FetchLike } from '../src/api.js';
import { WhatIfController } from '../src/controller.js';
import type { AttributionPayload, FeatureSpec, HistoryEntry } from '../src/types.js';
import { loadCase1Document } from './fixtures.js';

const FEATURES: FeatureSpec[] = [
  { name: 'alpha', kind: 'numerical', controllable: true },
  { name: 'beta', kind: 'numerical', controllable: false },
];

/**
 * In-memory stand-in for the service: score = alpha, prediction = score >= 0,
 * history appended per what-if call. Counts requests per endpoint.
 */
class FakeService {
  instance: Record<string, number> = {};
  history: HistoryEntry[] = [];
  counts = { sessions: 0, whatif: 0, pi: 0, history: 0 };

  private attribution(): AttributionPayload {
    return {
      phi: { alpha: this.instance.alpha, beta: 0 },
      base_value: 0,
      target_score: this.instance.alpha,
      backend: 'exact',
      seed: 0,
      background_digest: 'fake',
    };
  }

  private json(body: unknown, status = 200): Response {
    return new Response(JSON.stringify(body), {
      status,
      headers: { 'Content-Type': 'application/json' },
    });
  }

  fetch: FetchLike = async (input, init) => {
    const url = String(input);
    const body = init?.body ? JSON.parse(String(init.body)) : {};
    if (url.endsWith('/sessions')) {
      this.counts.sessions += 1;
      this.instance = { ...body.instance };
      return this.json(
        {
          session: 'fake-session',
          prediction: this.instance.alpha >= 0 ? 1 : 0,
          score: this.instance.alpha,
          attribution: this.attribution(),
          instance: { ...this.instance },
        },
        201,
      );
    }
    if (url.endsWith('/whatif')) {
      this.counts.whatif += 1;
      const edits = body.edits as Record<string, number>;
      for (const [name, value] of Object.entries(edits)) {
        this.instance[name] = value;
      }
      const prediction = this.instance.alpha >= 0 ? 1 : 0;
      this.history.push({
        edits,
        prediction,
        score: this.instance.alpha,
        attribution_digest: 'digest',
      });
      return this.json({
        prediction,
        score: this.instance.alpha,
        previous_score: null,
        attribution: this.attribution(),
        deltas: { alpha: 0, beta: 0 },
        instance: { ...this.instance },
      });
    }
    if (url.endsWith('/pi')) {
      this.counts.pi += 1;
      return this.json(loadCase1Document());
    }
    if (url.endsWith('/history')) {
      this.counts.history += 1;
      return this.json({ entries: this.history });
    }
    return this.json({ detail: `unexpected call: ${url}` }, 500);
  };
}

function makeController(service: FakeService) {
  return new WhatIfController(new ApiClient('http://fake', service.fetch));
}

describe('the what-if loop', () => {
  it('one apply issues exactly one /whatif and one /pi and appends one timeline entry', async () => {
    const service = new FakeService();
    const controller = makeController(service);
    await controller.start('cohort', 'linear', FEATURES, { alpha: -1, beta: 0 });
    expect(service.counts).toEqual({ sessions: 1, whatif: 0, pi: 1, history: 0 });

    await controller.applyEdits({ alpha: 2 });
    expect(service.counts).toEqual({ sessions: 1, whatif: 1, pi: 2, history: 0 });
    expect(controller.state.timeline).toHaveLength(1);
    expect(controller.state.prediction).toBe(1);
  });

  it('editing one feature updates the prediction badge', async () => {
    const service = new FakeService();
    const controller = makeController(service);
    await controller.start('cohort', 'linear', FEATURES, { alpha: -1, beta: 0 });
    expect(controller.state.prediction).toBe(0);
    await controller.applyEdits({ alpha: 1.5 });
    expect(controller.state.prediction).toBe(1);
  });

  it('empty edits are a guarded no-op: no requests, no timeline entry', async () => {
    const service = new FakeService();
    const controller = makeController(service);
    await controller.start('cohort', 'linear', FEATURES, { alpha: -1, beta: 0 });
    const before = { ...service.counts };
    expect(controller.canApply({})).toBe(false);
    await controller.applyEdits({});
    expect(service.counts).toEqual(before);
    expect(controller.state.timeline).toHaveLength(0);
  });

  it('replaying the history endpoint reproduces the final prediction badge', async () => {
    const service = new FakeService();
    const controller = makeController(service);
    await controller.start('cohort', 'linear', FEATURES, { alpha: -1, beta: 0 });
    await controller.applyEdits({ alpha: 0.5 });
    await controller.applyEdits({ alpha: -3 });
    await controller.applyEdits({ beta: 9 });
    const replayed = await controller.replayFromHistory();
    expect(replayed).toBe(controller.state.prediction);
    expect(replayed).toBe(0);
  });

  it('replay of an untouched session falls back to the initial prediction', async () => {
    const service = new FakeService();
    const controller = makeController(service);
    await controller.start('cohort', 'linear', FEATURES, { alpha: 3, beta: 0 });
    expect(await controller.replayFromHistory()).toBe(1);
  });

  it('stores the latest influence document verbatim for the views', async () => {
    const service = new FakeService();
    const controller = makeController(service);
    await controller.start('cohort', 'linear', FEATURES, { alpha: -1, beta: 0 });
    expect(controller.state.piDocument?.feature_names).toHaveLength(5);
    expect(controller.state.piDocument?.influence.orientation).toBe('rows-influence-columns');
  });

  it('surfaces API errors without crashing', async () => {
    const failing: FetchLike = async () =>
      new Response(JSON.stringify({ detail: 'unknown dataset' }), { status: 404 });
    const controller = new WhatIfController(new ApiClient('http://fake', failing));
    await controller.start('nope', 'linear', FEATURES, { alpha: 0, beta: 0 });
    expect(controller.state.error).toBe('unknown dataset');
    expect(controller.state.pending).toBe(false);
  });
});
