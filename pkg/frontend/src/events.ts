// Outgoing participant actions.
//
// Every physical action mints exactly one idempotency key and one local
// timestamp at the moment it happens; network retries reuse both, so
// the server sees at most one copy no matter how flaky the link is.

import { ApiClient, ApiError } from "./http.js";
import { EventAck, PaasPayload, TlxPayload } from "./protocol.js";

export interface ActionExtras {
  key?: string;
  tlx?: TlxPayload;
  paas?: PaasPayload;
}

export interface SenderOptions {
  now?: () => number;
  maxAttempts?: number;
  backoffMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

function randomTag(): string {
  const cryptoObj = (globalThis as { crypto?: { randomUUID?: () => string } }).crypto;
  if (cryptoObj?.randomUUID) {
    return cryptoObj.randomUUID().slice(0, 8);
  }
  return Math.random().toString(36).slice(2, 10);
}

export class EventSender {
  offsetMs: number;
  private readonly tag = randomTag();
  private counter = 0;
  private readonly now: () => number;
  private readonly maxAttempts: number;
  private readonly backoffMs: number;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
    offsetMs: number,
    options: SenderOptions = {},
  ) {
    this.offsetMs = offsetMs;
    this.now = options.now ?? (() => performance.now());
    this.maxAttempts = options.maxAttempts ?? 3;
    this.backoffMs = options.backoffMs ?? 100;
    this.sleep =
      options.sleep ?? ((ms) => new Promise((resolve) => setTimeout(resolve, ms)));
  }

  nextKey(): string {
    this.counter += 1;
    return `${this.tag}-${this.counter}`;
  }

  /** Send one action stamped at the moment of the call. */
  send(kind: string, extras: ActionExtras = {}): Promise<EventAck> {
    return this.sendStamped(kind, this.now(), extras);
  }

  /** Send one action with a caller-provided local timestamp. */
  async sendStamped(
    kind: string,
    clientAtMs: number,
    extras: ActionExtras = {},
  ): Promise<EventAck> {
    const idempotencyKey = this.nextKey();
    let backoff = this.backoffMs;
    let lastError: unknown;
    for (let attempt = 0; attempt < this.maxAttempts; attempt++) {
      try {
        return await this.api.postEvent(this.sessionId, {
          kind,
          client_at_ms: clientAtMs,
          offset_ms: this.offsetMs,
          key: extras.key ?? null,
          tlx: extras.tlx ?? null,
          paas: extras.paas ?? null,
          idempotency_key: idempotencyKey,
        });
      } catch (err) {
        if (err instanceof ApiError) {
          throw err;          // semantic rejection: retrying cannot help
        }
        lastError = err;
        if (attempt + 1 < this.maxAttempts) {
          await this.sleep(backoff);
          backoff *= 2;
        }
      }
    }
    throw lastError;
  }
}
