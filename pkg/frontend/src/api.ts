import type { Analysis, ChatResponse } from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
    this.name = "ApiError";
  }
}

async function postJson<T>(url: string, payload: unknown): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  } catch (err) {
    throw new ApiError(`network error: ${String(err)}`);
  }
  if (!response.ok) {
    const body = await response.text().catch(() => "");
    throw new ApiError(`HTTP ${response.status}: ${body.slice(0, 200)}`, response.status);
  }
  return (await response.json()) as T;
}

export class ChatApi {
  constructor(readonly baseUrl: string) {}

  async health(): Promise<{ status: string; version: string }> {
    const response = await fetch(`${this.baseUrl}/health`);
    if (!response.ok) throw new ApiError(`HTTP ${response.status}`, response.status);
    return response.json();
  }

  analyze(text: string): Promise<Analysis> {
    return postJson(`${this.baseUrl}/api/analyze`, { text });
  }

  chat(message: string, sessionId: string | null): Promise<ChatResponse> {
    const payload: Record<string, string> = { message };
    if (sessionId) payload.session_id = sessionId;
    return postJson(`${this.baseUrl}/api/chat`, payload);
  }
}
