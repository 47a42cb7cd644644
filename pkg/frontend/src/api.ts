/** Thin typed client for the session server's /v1 JSON API. */

import {
  checkSchemaVersion,
  Design,
  Direction,
  KeyEvent,
  Snapshot,
  Suggestion,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parse<T extends { schema_version?: number }>(
  resp: Response,
): Promise<T> {
  const body = (await resp.json()) as T & { error?: string };
  if (!resp.ok) {
    throw new ApiError(resp.status, body.error ?? `HTTP ${resp.status}`);
  }
  checkSchemaVersion(body);
  return body;
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  private async post<T extends { schema_version?: number }>(
    path: string,
    body: unknown,
  ): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return parse<T>(resp);
  }

  private async get<T extends { schema_version?: number }>(
    path: string,
  ): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`);
    return parse<T>(resp);
  }

  createSession(design: Design, direction: Direction, k?: number): Promise<Snapshot> {
    return this.post<Snapshot>("/v1/sessions", {
      design,
      direction,
      k: k ?? null,
      model_tag: "default",
    });
  }

  getSnapshot(sessionId: string): Promise<Snapshot> {
    return this.get<Snapshot>(`/v1/sessions/${sessionId}`);
  }

  postEvent(sessionId: string, event: KeyEvent): Promise<Snapshot> {
    return this.post<Snapshot>(`/v1/sessions/${sessionId}/events`, event);
  }

  async getSuggestions(sessionId: string): Promise<Suggestion[]> {
    const body = await this.get<{
      schema_version: number;
      suggestions: Suggestion[];
    }>(`/v1/sessions/${sessionId}/suggestions`);
    return body.suggestions;
  }

  async health(): Promise<void> {
    await this.get<{ schema_version: number; status: string }>("/v1/health");
  }
}
