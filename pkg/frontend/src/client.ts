// Session orchestration: one SessionClient owns the socket, the clock
// offset, the beep handler and the local input echo.
//
// Stream callbacks never touch state directly; every message is pushed
// through a single promise chain so handling stays strictly ordered
// even while a beep_played post is in flight.

import { ToneContextLike } from "./audio.js";
import { BeepHandler, BeepRecord } from "./beep.js";
import { runClockSync, ClockEstimate } from "./clock.js";
import { EventSender } from "./events.js";
import { ApiClient, ApiError } from "./http.js";
import { KeypadEcho } from "./keypad.js";
import {
  EventAck,
  ServerMessage,
  parseServerMessage,
} from "./protocol.js";
import { ClientSession } from "./session.js";
import { PaasFormState, TlxFormState } from "./forms.js";

export interface WsLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type WsFactory = (url: string) => WsLike;

export interface SessionClientOptions {
  api: ApiClient;
  wsBaseUrl: string;
  wsFactory: WsFactory;
  audio?: ToneContextLike | null;
  now?: () => number;
  onSnapshot?: () => void;
  onBeep?: (record: BeepRecord) => void;
  onBeepFlash?: () => void;
  clock?: ClockEstimate;
}

export class SessionClient {
  readonly session: ClientSession;
  readonly keypad = new KeypadEcho();
  readonly beeps: BeepHandler;
  readonly sender: EventSender;
  readonly clock: ClockEstimate;

  finished = false;
  /** Last error raised while handling a stream message, if any. */
  lastStreamError: unknown = null;
  private socket: WsLike | null = null;
  private pump: Promise<void> = Promise.resolve();
  private finishedResolve: (() => void) | null = null;
  private readonly finishedPromise: Promise<void>;
  private readonly now: () => number;
  private readonly onSnapshot?: () => void;

  private constructor(
    private readonly options: SessionClientOptions,
    sessionId: string,
    clock: ClockEstimate,
  ) {
    this.clock = clock;
    this.now = options.now ?? (() => performance.now());
    this.onSnapshot = options.onSnapshot;
    this.session = new ClientSession(sessionId, clock.offsetMs);
    this.sender = new EventSender(options.api, sessionId, clock.offsetMs, {
      now: this.now,
    });
    this.beeps = new BeepHandler(this.sender, {
      audio: options.audio ?? null,
      now: this.now,
      onFlash: options.onBeepFlash,
    });
    this.finishedPromise = new Promise((resolve) => {
      this.finishedResolve = resolve;
    });
  }

  /**
   * Create a session on the server and return a client for it.  The
   * clock handshake runs first; without an offset no event may be
   * sent, so a failed sync leaves the caller blocked.
   */
  static async create(
    options: SessionClientOptions,
    configText: string,
    timeScale = 1.0,
  ): Promise<SessionClient> {
    const sessionId = await options.api.createSession(configText, timeScale);
    const clock = options.clock ?? (await runClockSync(options.api, { now: options.now }));
    return new SessionClient(options, sessionId, clock);
  }

  /** Open the stream; resolves once the first snapshot arrives. */
  connect(): Promise<void> {
    const socket = this.options.wsFactory(
      `${this.options.wsBaseUrl}/sessions/${this.session.id}/stream`,
    );
    this.socket = socket;
    return new Promise((resolve, reject) => {
      let sawSnapshot = false;
      socket.onmessage = (ev) => {
        const raw = typeof ev.data === "string" ? ev.data : String(ev.data);
        // one strictly ordered chain; a failing handler must not stall
        // every message behind it
        this.pump = this.pump.then(async () => {
          const message = parseServerMessage(raw);
          await this.handleMessage(message);
          if (!sawSnapshot && message.type === "snapshot") {
            sawSnapshot = true;
            resolve();
          }
        }).catch((err) => {
          this.lastStreamError = err;
        });
      };
      socket.onerror = () => {
        if (!sawSnapshot) {
          reject(new Error("stream failed before first snapshot"));
        }
      };
      socket.onclose = () => {
        if (!sawSnapshot) {
          reject(new Error("stream closed before first snapshot"));
        }
      };
    });
  }

  private async handleMessage(message: ServerMessage): Promise<void> {
    switch (message.type) {
      case "snapshot":
        this.session.pushSnapshot(message);
        this.keypad.prune(message.session_ms);
        this.onSnapshot?.();
        break;
      case "beep": {
        const record = await this.beeps.handle(message);
        if (record !== null) {
          this.options.onBeep?.(record);
        }
        break;
      }
      case "finished":
        this.finished = true;
        this.finishedResolve?.();
        break;
    }
  }

  /** Resolves when the server announces the session is over. */
  waitFinished(): Promise<void> {
    return this.finishedPromise;
  }

  close(): void {
    this.socket?.close();
  }

  displayedEntry(): string {
    return this.keypad.display(this.session.ackedEntry());
  }

  async pressKeypad(key: string): Promise<EventAck> {
    const id = this.keypad.press(key);
    try {
      const ack = await this.sender.send("keypad", { key });
      this.keypad.acked(id, ack.session_ms);
      return ack;
    } catch (err) {
      this.keypad.rejected(id);
      throw err;
    }
  }

  async pressBeepButton(): Promise<{ ack: EventAck; reactionMs: number | null }> {
    const pressedAt = this.now();
    const reactionMs = this.beeps.reactionTimeMs(pressedAt);
    const ack = await this.sender.sendStamped("beep_button", pressedAt);
    return { ack, reactionMs };
  }

  lineButton(pressed: boolean): Promise<EventAck> {
    return this.sender.send(pressed ? "line_button_down" : "line_button_up");
  }

  /** Submit a complete TLX form; an incomplete one never leaves the client. */
  submitTlx(form: TlxFormState): Promise<EventAck> {
    return this.sender.send("tlx_submit", { tlx: form.payload() });
  }

  submitPaas(form: PaasFormState): Promise<EventAck> {
    return this.sender.send("paas_submit", { paas: form.payload() });
  }

  async fetchExports(): Promise<{ events: string; summary: string }> {
    const api = this.options.api;
    return {
      events: await api.fetchExport(this.session.id, "events.csv"),
      summary: await api.fetchExport(this.session.id, "summary.txt"),
    };
  }
}

export { ApiError };
