import {
  EventAck,
  EventAckSchema,
  EventBody,
  SessionCreatedSchema,
  TimeReply,
  TimeReplySchema,
  View,
  ViewSchema,
} from "./protocol.js";

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<{ status: number; text(): Promise<string> }>;

export class ApiError extends Error {
  constructor(readonly status: number, readonly detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

/** Thin typed wrapper over the service HTTP API. */
export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = globalThis.fetch as FetchLike,
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<string> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    if (response.status >= 400) {
      let detail = text;
      try {
        detail = String(JSON.parse(text).detail ?? text);
      } catch {
        // non-JSON error body, keep the raw text
      }
      throw new ApiError(response.status, detail);
    }
    return text;
  }

  async createSession(configText: string, timeScale = 1.0): Promise<string> {
    const text = await this.request("POST", "/sessions", {
      config_text: configText,
      time_scale: timeScale,
    });
    return SessionCreatedSchema.parse(JSON.parse(text)).id;
  }

  async timeProbe(t0Ms: number): Promise<TimeReply> {
    const text = await this.request("POST", "/time", { t0_ms: t0Ms });
    return TimeReplySchema.parse(JSON.parse(text));
  }

  async postEvent(sessionId: string, body: EventBody): Promise<EventAck> {
    const text = await this.request("POST", `/sessions/${sessionId}/events`, body);
    return EventAckSchema.parse(JSON.parse(text));
  }

  async fetchView(sessionId: string): Promise<View> {
    const text = await this.request("GET", `/sessions/${sessionId}/view`);
    return ViewSchema.parse(JSON.parse(text));
  }

  async fetchExport(sessionId: string, name: "events.csv" | "summary.txt"): Promise<string> {
    return this.request("GET", `/sessions/${sessionId}/export/${name}`);
  }
}
