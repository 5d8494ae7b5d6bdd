import type {
  CatalogResponse,
  EditValue,
  HistoryEntry,
  ResultDocument,
  SessionResponse,
  WhatIfResponse,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function fail(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    /* non-JSON error body; keep the status text */
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) await fail(response);
    return (await response.json()) as T;
  }

  private post(body: unknown): RequestInit {
    return {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    };
  }

  catalog(): Promise<CatalogResponse> {
    return this.request('/catalog');
  }

  createSession(
    dataset: string,
    model: string,
    instance: Record<string, EditValue>,
  ): Promise<SessionResponse> {
    return this.request('/sessions', this.post({ dataset, model, instance }));
  }

  whatif(session: string, edits: Record<string, EditValue>): Promise<WhatIfResponse> {
    return this.request(`/sessions/${session}/whatif`, this.post({ edits }));
  }

  pi(
    session: string,
    options: { zero_policy?: string; controllable?: string[] | null } = {},
  ): Promise<ResultDocument> {
    return this.request(`/sessions/${session}/pi`, this.post(options));
  }

  history(session: string): Promise<{ entries: HistoryEntry[] }> {
    return this.request(`/sessions/${session}/history`);
  }
}
