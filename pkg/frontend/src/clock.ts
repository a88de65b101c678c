// NTP-style clock sync against POST /time.
//
// Each round trip stamps t0 locally, reads t1/t2 from the server and
// stamps t3 on receipt.  The probe with the smallest round-trip time
// wins; its offset is what gets attached to every outgoing event.

import { ApiClient } from "./http.js";

export interface ClockSample {
  offsetMs: number;
  rttMs: number;
}

export interface ClockEstimate extends ClockSample {
  samples: number;
}

export class ClockSyncBlocked extends Error {
  constructor(message = "clock sync produced no samples") {
    super(message);
    this.name = "ClockSyncBlocked";
  }
}

export interface ClockSyncOptions {
  probes?: number;
  attemptsPerProbe?: number;
  backoffMs?: number;
  now?: () => number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

export function sampleFromStamps(
  t0: number, t1: number, t2: number, t3: number,
): ClockSample {
  return {
    offsetMs: ((t1 - t0) + (t2 - t3)) / 2,
    rttMs: (t3 - t0) - (t2 - t1),
  };
}

/**
 * Run the sync handshake and return the min-rtt offset estimate.
 *
 * Failed probes are retried with doubling backoff; if every probe
 * fails the session must stay blocked, signalled by ClockSyncBlocked.
 */
export async function runClockSync(
  api: ApiClient,
  options: ClockSyncOptions = {},
): Promise<ClockEstimate> {
  const probes = options.probes ?? 8;
  const attemptsPerProbe = options.attemptsPerProbe ?? 3;
  const now = options.now ?? (() => performance.now());
  const sleep = options.sleep ?? defaultSleep;
  let backoff = options.backoffMs ?? 100;

  const collected: ClockSample[] = [];
  for (let i = 0; i < probes; i++) {
    for (let attempt = 0; attempt < attemptsPerProbe; attempt++) {
      const t0 = now();
      try {
        const reply = await api.timeProbe(t0);
        collected.push(sampleFromStamps(t0, reply.t1_ms, reply.t2_ms, now()));
        break;
      } catch {
        if (attempt + 1 < attemptsPerProbe) {
          await sleep(backoff);
          backoff = Math.min(backoff * 2, 5000);
        }
      }
    }
  }
  if (collected.length === 0) {
    throw new ClockSyncBlocked();
  }
  let best = collected[0]!;
  for (const sample of collected) {
    if (sample.rttMs < best.rttMs) {
      best = sample;
    }
  }
  return { ...best, samples: collected.length };
}
