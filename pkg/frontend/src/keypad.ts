// Local echo for the answer keypad.
//
// The server owns the real entry string; a key press stays "pending"
// locally until the latest snapshot is recent enough to include it.
// What the participant sees is always: entry acknowledged by the
// latest snapshot, plus the still-pending keys applied in press order.

interface PendingKey {
  id: number;
  key: string;
  // session-clock stamp from the event ack; null while in flight
  ackedAtSessionMs: number | null;
}

export class KeypadEcho {
  private pending: PendingKey[] = [];
  private nextId = 1;

  press(key: string): number {
    const id = this.nextId++;
    this.pending.push({ id, key, ackedAtSessionMs: null });
    return id;
  }

  /** The event ack arrived; remember where it landed on the session clock. */
  acked(id: number, sessionMs: number): void {
    const entry = this.pending.find((p) => p.id === id);
    if (entry) {
      entry.ackedAtSessionMs = sessionMs;
    }
  }

  /** The server refused the key; stop echoing it. */
  rejected(id: number): void {
    this.pending = this.pending.filter((p) => p.id !== id);
  }

  /** A snapshot at this session time covers every ack at or before it. */
  prune(snapshotSessionMs: number): void {
    this.pending = this.pending.filter(
      (p) => p.ackedAtSessionMs === null || p.ackedAtSessionMs > snapshotSessionMs,
    );
  }

  get pendingKeys(): string[] {
    return this.pending.map((p) => p.key);
  }

  display(ackedEntry: string): string {
    let shown = ackedEntry;
    for (const { key } of this.pending) {
      if (key === "clear" || key === "submit") {
        shown = "";
      } else {
        shown += key;
      }
    }
    return shown;
  }
}
