// Thin fetch client for the session API. The fetch function is injectable so
// tests can drive the client against a fake transport.

import type {
  ClairvoyantResponse,
  InstanceInfo,
  SessionRequest,
  SessionState,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (...args) => globalThis.fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        detail = body.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  listInstances(): Promise<InstanceInfo[]> {
    return this.request("/api/instances");
  }

  async createSession(req: SessionRequest): Promise<string> {
    const out = await this.request<{ id: string }>("/api/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    return out.id;
  }

  getState(id: string): Promise<SessionState> {
    return this.request(`/api/sessions/${id}`);
  }

  submitDecision(
    id: string,
    choice: { index?: number; d?: number },
  ): Promise<{ accepted: boolean; era_index: number; chosen_index: number }> {
    return this.request(`/api/sessions/${id}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(choice),
    });
  }

  getClairvoyant(id: string): Promise<ClairvoyantResponse> {
    return this.request(`/api/sessions/${id}/clairvoyant`);
  }

  traceUrl(id: string): string {
    return `${this.base}/api/sessions/${id}/trace.csv`;
  }
}
