import { ApiClient, ApiError } from './api.js';
import { appendEntry, finalPrediction, type TimelineEntry } from './timeline.js';
import type {
  AttributionPayload,
  EditValue,
  FeatureSpec,
  ResultDocument,
} from './types.js';

export interface ViewState {
  session: string | null;
  dataset: string | null;
  model: string | null;
  features: FeatureSpec[];
  instance: Record<string, number>;
  initialPrediction: number | null;
  prediction: number | null;
  score: number | null;
  attribution: AttributionPayload | null;
  piDocument: ResultDocument | null;
  zeroPolicy: 'strict' | 'inclusive';
  controllable: Record<string, boolean>;
  timeline: TimelineEntry[];
  pending: boolean;
  error: string | null;
}

function initialState(): ViewState {
  return {
    session: null,
    dataset: null,
    model: null,
    features: [],
    instance: {},
    initialPrediction: null,
    prediction: null,
    score: null,
    attribution: null,
    piDocument: null,
    zeroPolicy: 'strict',
    controllable: {},
    timeline: [],
    pending: false,
    error: null,
  };
}

/**
 * Orchestrates the edit -> /whatif -> /pi cycle. One apply produces exactly
 * one what-if request, one influence request, and one timeline entry; a
 * pending cycle blocks further applies, matching the service's one-in-flight
 * contract.
 */
export class WhatIfController {
  state: ViewState = initialState();

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: ViewState) => void = () => {},
  ) {}

  private emit(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  private controllableList(): string[] | null {
    const names = this.state.features
      .filter((f) => this.state.controllable[f.name])
      .map((f) => f.name);
    if (names.length === 0 || names.length === this.state.features.length) {
      return null; // unrestricted
    }
    return names;
  }

  async start(
    dataset: string,
    model: string,
    features: FeatureSpec[],
    instance: Record<string, EditValue>,
  ): Promise<void> {
    this.state = initialState();
    const controllable: Record<string, boolean> = {};
    for (const f of features) controllable[f.name] = f.controllable;
    this.emit({ dataset, model, features, controllable, pending: true });
    try {
      const created = await this.api.createSession(dataset, model, instance);
      this.emit({
        session: created.session,
        instance: created.instance,
        prediction: created.prediction,
        initialPrediction: created.prediction,
        score: created.score,
        attribution: created.attribution,
        pending: false,
        error: null,
      });
      await this.refreshInfluence();
    } catch (err) {
      this.fail(err);
    }
  }

  /** True when an apply would be a no-op (guards the Apply button). */
  canApply(edits: Record<string, EditValue>): boolean {
    return !this.state.pending && this.state.session !== null && Object.keys(edits).length > 0;
  }

  async applyEdits(edits: Record<string, EditValue>): Promise<void> {
    if (!this.canApply(edits)) return;
    const session = this.state.session as string;
    this.emit({ pending: true, error: null });
    try {
      const outcome = await this.api.whatif(session, edits);
      this.emit({
        instance: outcome.instance,
        prediction: outcome.prediction,
        score: outcome.score,
        attribution: outcome.attribution,
        timeline: appendEntry(this.state.timeline, edits, outcome.prediction, outcome.score),
      });
      const doc = await this.api.pi(session, {
        zero_policy: this.state.zeroPolicy,
        controllable: this.controllableList(),
      });
      this.emit({ piDocument: doc, pending: false });
    } catch (err) {
      this.fail(err);
    }
  }

  async refreshInfluence(): Promise<void> {
    if (this.state.session === null || this.state.pending) return;
    this.emit({ pending: true, error: null });
    try {
      const doc = await this.api.pi(this.state.session, {
        zero_policy: this.state.zeroPolicy,
        controllable: this.controllableList(),
      });
      this.emit({ piDocument: doc, pending: false });
    } catch (err) {
      this.fail(err);
    }
  }

  async setZeroPolicy(policy: 'strict' | 'inclusive'): Promise<void> {
    if (policy === this.state.zeroPolicy) return;
    this.emit({ zeroPolicy: policy });
    await this.refreshInfluence();
  }

  toggleControllable(name: string): void {
    this.emit({
      controllable: { ...this.state.controllable, [name]: !this.state.controllable[name] },
    });
  }

  /** Features the latest document recommends editing next. */
  suggestedInterventions(): Set<string> {
    const doc = this.state.piDocument;
    if (!doc) return new Set();
    return new Set([...doc.alt.selected, ...doc.calt.selected]);
  }

  /**
   * Reconstruct the final prediction badge from the service's history log;
   * used to verify the timeline against server state.
   */
  async replayFromHistory(): Promise<number | null> {
    if (this.state.session === null || this.state.initialPrediction === null) return null;
    const log = await this.api.history(this.state.session);
    return finalPrediction(log.entries, this.state.initialPrediction);
  }

  private fail(err: unknown): void {
    const message =
      err instanceof ApiError
        ? err.detail
        : err instanceof Error
          ? err.message
          : String(err);
    this.emit({ pending: false, error: message });
  }
}
