import { describe, expect, it } from "vitest";

import { SnapshotMessage, View } from "../src/protocol.js";
import { ClientSession } from "../src/session.js";
import { lcg } from "./helpers.js";

function snapshot(sessionMs: number, overrides: Partial<View> = {}): SnapshotMessage {
  return {
    type: "snapshot",
    session_ms: sessionMs,
    view: {
      mode: "running_phase",
      scene: "dual",
      phase: 1,
      clock_ms: sessionMs,
      phase_remaining_ms: null,
      pause_remaining_ms: null,
      problem: null,
      entry: "",
      line_position: null,
      line_low: 0.35,
      line_high: 0.65,
      show_tlx: false,
      show_paas: false,
      exports_ready: false,
      ...overrides,
    },
  };
}

describe("ClientSession", () => {
  it("interpolates the line between the two buffered snapshots", () => {
    const session = new ClientSession("s", 0);
    session.pushSnapshot(snapshot(1000, { line_position: 0.2 }));
    session.pushSnapshot(snapshot(1050, { line_position: 0.4 }));

    expect(session.linePositionAt(1000)).toBeCloseTo(0.2, 12);
    expect(session.linePositionAt(1025)).toBeCloseTo(0.3, 12);
    expect(session.linePositionAt(1050)).toBeCloseTo(0.4, 12);
  });

  it("never renders outside the span of the buffer, even extrapolating", () => {
    const session = new ClientSession("s", 0);
    session.pushSnapshot(snapshot(1000, { line_position: 0.2 }));
    session.pushSnapshot(snapshot(1050, { line_position: 0.4 }));

    expect(session.linePositionAt(800)).toBe(0.2);
    expect(session.linePositionAt(5000)).toBe(0.4);

    const random = lcg(99);
    for (let i = 0; i < 200; i++) {
      const at = random() * 4000;
      const position = session.linePositionAt(at)!;
      expect(position).toBeGreaterThanOrEqual(0.2);
      expect(position).toBeLessThanOrEqual(0.4);
    }
  });

  it("renders from the single snapshot before the buffer fills", () => {
    const session = new ClientSession("s", 0);
    expect(session.linePositionAt(0)).toBeNull();

    session.pushSnapshot(snapshot(400, { line_position: 0.5 }));
    expect(session.linePositionAt(1234)).toBe(0.5);
  });

  it("ignores stale snapshots so latest always wins", () => {
    const session = new ClientSession("s", 0);
    session.pushSnapshot(snapshot(2000, { problem: "12 + 34" }));
    session.pushSnapshot(snapshot(1900, { problem: "9 + 9" }));

    expect(session.latest?.session_ms).toBe(2000);
    expect(session.problemText()).toBe("12 + 34");
  });

  it("always shows the problem and entry of the latest snapshot", () => {
    const session = new ClientSession("s", 0);
    session.pushSnapshot(snapshot(100, { problem: "3 + 4", entry: "" }));
    session.pushSnapshot(snapshot(200, { problem: "5 + 6", entry: "1" }));

    expect(session.problemText()).toBe("5 + 6");
    expect(session.ackedEntry()).toBe("1");
  });

  it("converts local time with the negotiated offset", () => {
    const session = new ClientSession("s", 250.5);
    expect(session.toServerMs(1000)).toBe(1250.5);
  });
});
