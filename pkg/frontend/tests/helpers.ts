// Shared fakes for the unit suites: an in-memory fetch, a scriptable
// audio context and a deterministic RNG.

import { AudioParamLike, GainLike, OscillatorLike, ToneContextLike } from "../src/audio.js";
import { FetchLike } from "../src/http.js";

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

export type RouteHandler = (body: unknown, url: string) =>
  { status: number; body: unknown } | Promise<{ status: number; body: unknown }>;

export function fakeFetch(
  routes: Record<string, RouteHandler>,
  log: RecordedRequest[] = [],
): FetchLike {
  return async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body) : undefined;
    log.push({ url, method, body });
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const key = `${method} ${path}`;
    const handler =
      routes[key] ??
      Object.entries(routes).find(([pattern]) => {
        const [m, p] = pattern.split(" ", 2);
        return m === method && p !== undefined && new RegExp(`^${p}$`).test(path);
      })?.[1];
    if (!handler) {
      throw new TypeError(`network error: no route for ${key}`);
    }
    const result = await handler(body, url);
    return {
      status: result.status,
      text: async () =>
        typeof result.body === "string" ? result.body : JSON.stringify(result.body),
    };
  };
}

class FakeParam implements AudioParamLike {
  value = 0;
  schedule: Array<{ value: number; startTime: number }> = [];
  setValueAtTime(value: number, startTime: number): void {
    this.schedule.push({ value, startTime });
  }
}

export class FakeOscillator implements OscillatorLike {
  frequency = new FakeParam();
  startedAt: number | null = null;
  stoppedAt: number | null = null;
  connectedTo: unknown = null;
  connect(node: unknown): unknown {
    this.connectedTo = node;
    return node;
  }
  start(when: number): void {
    this.startedAt = when;
  }
  stop(when: number): void {
    this.stoppedAt = when;
  }
}

export class FakeGain implements GainLike {
  gain = new FakeParam();
  connectedTo: unknown = null;
  connect(node: unknown): unknown {
    this.connectedTo = node;
    return node;
  }
}

export class FakeAudioContext implements ToneContextLike {
  currentTime = 0;
  destination = { sink: true };
  oscillators: FakeOscillator[] = [];
  gains: FakeGain[] = [];
  createOscillator(): FakeOscillator {
    const osc = new FakeOscillator();
    this.oscillators.push(osc);
    return osc;
  }
  createGain(): FakeGain {
    const gain = new FakeGain();
    this.gains.push(gain);
    return gain;
  }
}

/** Small deterministic generator so property-style tests are replayable. */
export function lcg(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
}

export const asyncNoop = () => Promise.resolve();
