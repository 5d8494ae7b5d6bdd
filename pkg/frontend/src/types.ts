/** Wire types mirrored from the service; the UI never re-derives numbers. */

export interface AttributionPayload {
  phi: Record<string, number>;
  base_value: number;
  target_score: number;
  backend: string;
  seed: number | null;
  background_digest: string;
  stderr?: Record<string, number>;
}

export interface AlterationPayload {
  row_sums: number[];
  selected: string[];
  restricted_to: string[] | null;
}

export interface ResultDocument {
  feature_names: string[];
  baseline: AttributionPayload;
  influence: { orientation: string; matrix: number[][] };
  conflict: { zero_policy: string; matrix: number[][] };
  graph: {
    proponents: string[];
    opponents: string[];
    support_arcs: [number, number][];
    attack_arcs: [number, number][];
  };
  alt: AlterationPayload;
  calt: AlterationPayload;
}

export interface FeatureSpec {
  name: string;
  kind: 'numerical' | 'categorical';
  categories?: string[];
  controllable: boolean;
  unit?: string;
}

export interface CatalogResponse {
  datasets: Record<string, { features: FeatureSpec[]; n: number }>;
  models: Record<string, string>;
}

export interface SessionResponse {
  session: string;
  prediction: number;
  score: number;
  attribution: AttributionPayload;
  instance: Record<string, number>;
}

export interface WhatIfResponse {
  prediction: number;
  score: number;
  previous_score: number | null;
  attribution: AttributionPayload;
  deltas: Record<string, number>;
  instance: Record<string, number>;
}

export interface HistoryEntry {
  edits: Record<string, number>;
  prediction: number;
  score: number;
  attribution_digest: string;
}

export type EditValue = number | string;
