import { describe, expect, it } from "vitest";

import { parseServerMessage } from "../src/protocol.js";

const view = {
  mode: "running_phase",
  scene: "progressive",
  phase: 1,
  clock_ms: 5020,
  phase_remaining_ms: 4980,
  pause_remaining_ms: null,
  problem: "17 + 25",
  entry: "4",
  line_position: null,
  line_low: null,
  line_high: null,
  show_tlx: false,
  show_paas: false,
  exports_ready: false,
};

describe("parseServerMessage", () => {
  it("decodes the three stream message types", () => {
    const snapshot = parseServerMessage(
      JSON.stringify({ type: "snapshot", session_ms: 5020.5, view }),
    );
    expect(snapshot.type).toBe("snapshot");

    const beep = parseServerMessage(
      JSON.stringify({ type: "beep", onset_ms: 10813, index: 0 }),
    );
    expect(beep).toEqual({ type: "beep", onset_ms: 10813, index: 0 });

    const finished = parseServerMessage(
      JSON.stringify({ type: "finished", session_ms: 70000 }),
    );
    expect(finished.type).toBe("finished");
  });

  it("rejects unknown message types", () => {
    expect(() =>
      parseServerMessage(JSON.stringify({ type: "banana", session_ms: 1 })),
    ).toThrow();
  });

  it("rejects snapshots with missing view fields", () => {
    const { problem: _dropped, ...partial } = view;
    expect(() =>
      parseServerMessage(
        JSON.stringify({ type: "snapshot", session_ms: 1, view: partial }),
      ),
    ).toThrow();
  });

  it("rejects malformed JSON", () => {
    expect(() => parseServerMessage("{not json")).toThrow();
  });
});
