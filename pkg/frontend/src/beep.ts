import { ToneContextLike, scheduleBeepTone, SCHEDULE_GUARD_S } from "./audio.js";
import { EventSender } from "./events.js";
import { BeepMessage } from "./protocol.js";

export interface BeepRecord {
  index: number;
  onsetMs: number;
  /** Local-clock time the tone actually starts (or the flash fired). */
  localStartMs: number;
  fallback: boolean;
}

export interface BeepHandlerOptions {
  audio?: ToneContextLike | null;
  now?: () => number;
  guardS?: number;
  /** Visual fallback when no audio output is available. */
  onFlash?: () => void;
}

/**
 * Turns beep commands from the stream into exactly one tone and one
 * beep_played event each.  Deduplication keys on the absolute onset
 * time: trial indexes restart every phase, onsets never repeat.
 */
export class BeepHandler {
  readonly played = new Map<number, BeepRecord>();   // keyed by onset_ms
  lastBeep: BeepRecord | null = null;

  private readonly audio: ToneContextLike | null;
  private readonly now: () => number;
  private readonly guardS: number;
  private readonly onFlash?: () => void;

  constructor(private readonly sender: EventSender, options: BeepHandlerOptions = {}) {
    this.audio = options.audio ?? null;
    this.now = options.now ?? (() => performance.now());
    this.guardS = options.guardS ?? SCHEDULE_GUARD_S;
    this.onFlash = options.onFlash;
  }

  async handle(message: BeepMessage): Promise<BeepRecord | null> {
    if (this.played.has(message.onset_ms)) {
      return null;
    }
    let localStartMs: number;
    let fallback = false;
    if (this.audio !== null) {
      const tone = scheduleBeepTone(this.audio, this.guardS);
      localStartMs = this.now() + tone.leadS * 1000;
    } else {
      fallback = true;
      localStartMs = this.now();
      this.onFlash?.();
    }
    const record: BeepRecord = {
      index: message.index,
      onsetMs: message.onset_ms,
      localStartMs,
      fallback,
    };
    this.played.set(message.onset_ms, record);
    this.lastBeep = record;
    // the stamp carries the audio start, not the command receipt; the
    // fallback flag rides in the key field
    await this.sender.sendStamped("beep_played", localStartMs,
      fallback ? { key: "fallback" } : {});
    return record;
  }

  /** Reaction time of a local press against the stamped tone start. */
  reactionTimeMs(pressLocalMs: number): number | null {
    if (this.lastBeep === null) {
      return null;
    }
    return pressLocalMs - this.lastBeep.localStartMs;
  }
}
