// Thin fetch client for the /v1 animator API.

import type { ModelEntry, WireError, WireSession } from "./types.js";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public body: WireError,
  ) {
    super(message);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(base + path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (response.status === 204) {
    return undefined as T;
  }
  const body = await response.json();
  if (!response.ok) {
    const err = body as WireError;
    throw new ApiError(err.code ?? `http-${response.status}`, err.message ?? "request failed", err);
  }
  return body as T;
}

export class Client {
  constructor(public base: string = "") {}

  models(): Promise<{ models: ModelEntry[] }> {
    return request(this.base, "/v1/models");
  }

  createSession(model: string, initialIndex = 0): Promise<WireSession> {
    return request(this.base, "/v1/sessions", {
      method: "POST",
      body: JSON.stringify({ model, initial_index: initialIndex }),
    });
  }

  getSession(id: string): Promise<WireSession> {
    return request(this.base, `/v1/sessions/${id}`);
  }

  fire(
    id: string,
    event: string,
    bindings: Record<string, string>,
    choice: number | null,
  ): Promise<WireSession> {
    return request(this.base, `/v1/sessions/${id}/fire`, {
      method: "POST",
      body: JSON.stringify({ event, bindings, choice }),
    });
  }

  backtrack(id: string, steps: number): Promise<WireSession> {
    return request(this.base, `/v1/sessions/${id}/backtrack`, {
      method: "POST",
      body: JSON.stringify({ steps }),
    });
  }

  deleteSession(id: string): Promise<void> {
    return request(this.base, `/v1/sessions/${id}`, { method: "DELETE" });
  }
}
