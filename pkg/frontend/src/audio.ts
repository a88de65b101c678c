// Tone scheduling on the audio hardware clock.
//
// Playback is scheduled slightly ahead on AudioContext.currentTime
// instead of started "now": the scheduled start is the only onset we
// can know to sub-10 ms accuracy, and it is what gets stamped.

export interface AudioParamLike {
  value: number;
  setValueAtTime(value: number, startTime: number): unknown;
}

export interface OscillatorLike {
  frequency: AudioParamLike;
  connect(node: unknown): unknown;
  start(when: number): void;
  stop(when: number): void;
}

export interface GainLike {
  gain: AudioParamLike;
  connect(node: unknown): unknown;
}

export interface ToneContextLike {
  currentTime: number;
  destination: unknown;
  createOscillator(): OscillatorLike;
  createGain(): GainLike;
}

export const BEEP_FREQUENCY_HZ = 1000;
export const BEEP_DURATION_S = 0.15;
export const SCHEDULE_GUARD_S = 0.01;

export interface ScheduledTone {
  /** Audio-clock start time, seconds. */
  startAudioS: number;
  /** Lead time between "now" and the scheduled start, seconds. */
  leadS: number;
}

export function scheduleBeepTone(
  context: ToneContextLike,
  guardS: number = SCHEDULE_GUARD_S,
): ScheduledTone {
  const startAudioS = context.currentTime + guardS;
  const oscillator = context.createOscillator();
  oscillator.frequency.value = BEEP_FREQUENCY_HZ;
  const gain = context.createGain();
  gain.gain.setValueAtTime(0.5, startAudioS);
  oscillator.connect(gain);
  gain.connect(context.destination);
  oscillator.start(startAudioS);
  oscillator.stop(startAudioS + BEEP_DURATION_S);
  return { startAudioS, leadS: guardS };
}

/** Pick up the browser AudioContext when one exists; null elsewhere. */
export function defaultAudioContext(): ToneContextLike | null {
  const w = globalThis as {
    AudioContext?: new () => ToneContextLike;
    webkitAudioContext?: new () => ToneContextLike;
  };
  const cls = w.AudioContext ?? w.webkitAudioContext;
  if (!cls) {
    return null;
  }
  try {
    return new cls();
  } catch {
    return null;
  }
}
