import {
  ApiError,
  CreateSessionResponse,
  RecordResponse,
  SessionView,
  WhatifResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin typed client over the session endpoints.  All physics lives on the
 * server; this only moves JSON around.  The fetch function is injectable so
 * tests can replay recorded exchanges.
 */
export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof payload === "object" && payload !== null && "detail" in payload
          ? String((payload as { detail: unknown }).detail)
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  createSession(nQubits: number, threshold?: number, mode = "manual") {
    const body: Record<string, unknown> = { n_qubits: nQubits, mode };
    if (threshold !== undefined) {
      body.threshold = threshold;
    }
    return this.request<CreateSessionResponse>("POST", "/sessions", body);
  }

  getSession(id: string) {
    return this.request<SessionView>("GET", `/sessions/${id}`);
  }

  record(id: string, setting: string, value: number, stderr?: number) {
    const body: Record<string, unknown> = { setting, value };
    if (stderr !== undefined) {
      body.stderr = stderr;
    }
    return this.request<RecordResponse>("POST", `/sessions/${id}/record`, body);
  }

  whatif(id: string, setting: string, value: number) {
    const params = new URLSearchParams({ setting, value: String(value) });
    return this.request<WhatifResponse>("GET", `/sessions/${id}/whatif?${params}`);
  }
}
