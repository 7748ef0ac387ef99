/**
 * Service client.  All query semantics come from the server; the client
 * only ships documents back and forth.  Each panel routes its requests
 * through a LatestGate so a stale response never overwrites a newer one.
 */

import {
  ProjectionPointDoc, QueryResponse, RecommendationDoc, StatsResponse, TargetDoc,
} from "./ast.js";

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(public status: number, public payload: unknown) {
    super(`service error ${status}: ${JSON.stringify(payload)}`);
  }
}

export class LatestGate {
  private seq = 0;

  /** Run a request; resolves null when a newer request was issued meanwhile. */
  async run<T>(request: () => Promise<T>): Promise<T | null> {
    this.seq += 1;
    const mine = this.seq;
    const result = await request();
    return mine === this.seq ? result : null;
  }
}

export class ApiClient {
  constructor(private baseUrl: string, private fetchFn: FetchLike) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    const payload = await response.json();
    if (response.status !== 200) throw new ApiError(response.status, payload);
    return payload as T;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    const payload = await response.json();
    if (response.status !== 200) throw new ApiError(response.status, payload);
    return payload as T;
  }

  async uploadCorpus(document: string): Promise<{ snapshot_id: string; stats: StatsResponse }> {
    const response = await this.fetchFn(this.baseUrl + "/corpus", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: document,
    });
    const payload = await response.json();
    if (response.status !== 200) throw new ApiError(response.status, payload);
    return payload as { snapshot_id: string; stats: StatsResponse };
  }

  /** Query by AST document; the response echoes the canonical text. */
  query(snapshotId: string, ast: TargetDoc): Promise<QueryResponse> {
    return this.post<QueryResponse>("/query", { snapshot_id: snapshotId, ast });
  }

  queryText(snapshotId: string, expr: string): Promise<QueryResponse> {
    return this.post<QueryResponse>("/query", { snapshot_id: snapshotId, expr });
  }

  recommend(snapshotId: string, ast: TargetDoc, k: number): Promise<RecommendationDoc[]> {
    return this.post<RecommendationDoc[]>("/recommend", { snapshot_id: snapshotId, ast, k });
  }

  projection(snapshotId: string, method: "tsne" | "pca", seed: number):
      Promise<ProjectionPointDoc[]> {
    return this.get<ProjectionPointDoc[]>(
      `/projection?snapshot_id=${encodeURIComponent(snapshotId)}&method=${method}&seed=${seed}`);
  }

  stats(snapshotId: string): Promise<StatsResponse> {
    return this.get<StatsResponse>(`/stats?snapshot_id=${encodeURIComponent(snapshotId)}`);
  }
}
