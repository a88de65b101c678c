import { SnapshotMessage, View } from "./protocol.js";

/**
 * Client-side picture of one live session.
 *
 * Keeps the two most recent server snapshots; the line is rendered by
 * interpolating between them, and the interpolated position never
 * leaves the range the two snapshots span.  Text state (problem,
 * entry, mode) always comes from the latest snapshot alone.
 */
export class ClientSession {
  previous: SnapshotMessage | null = null;
  latest: SnapshotMessage | null = null;

  constructor(readonly id: string, public offsetMs: number) {}

  pushSnapshot(message: SnapshotMessage): void {
    if (this.latest !== null && message.session_ms < this.latest.session_ms) {
      return;               // stale delivery, latest wins
    }
    this.previous = this.latest;
    this.latest = message;
  }

  get view(): View | null {
    return this.latest?.view ?? null;
  }

  problemText(): string | null {
    return this.latest?.view.problem ?? null;
  }

  ackedEntry(): string {
    return this.latest?.view.entry ?? "";
  }

  /**
   * Line position to draw at a given session time.  Linear between the
   * buffered snapshots, clamped to the interval they span.
   */
  linePositionAt(sessionMs: number): number | null {
    const latest = this.latest;
    if (latest === null || latest.view.line_position === null) {
      return null;
    }
    const previous = this.previous;
    if (previous === null || previous.view.line_position === null) {
      return latest.view.line_position;
    }
    const p0 = previous.view.line_position;
    const p1 = latest.view.line_position;
    const t0 = previous.session_ms;
    const t1 = latest.session_ms;
    if (t1 <= t0) {
      return p1;
    }
    const frac = (sessionMs - t0) / (t1 - t0);
    const raw = p0 + (p1 - p0) * frac;
    const low = Math.min(p0, p1);
    const high = Math.max(p0, p1);
    return Math.min(high, Math.max(low, raw));
  }

  /** Local client time converted to the server's clock. */
  toServerMs(clientMs: number): number {
    return clientMs + this.offsetMs;
  }
}
