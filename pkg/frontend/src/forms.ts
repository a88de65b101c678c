// Questionnaire state machines.  The DOM layer renders sliders from
// these; validity rules live here so they hold with or without a UI.

import { PaasPayload, TlxPayload } from "./protocol.js";

export const TLX_FIELDS = [
  "mental",
  "physical",
  "temporal",
  "performance",
  "effort",
  "frustration",
] as const;

export type TlxField = (typeof TLX_FIELDS)[number];

export class GridViolation extends Error {
  constructor(message: string) {
    super(message);
    this.name = "GridViolation";
  }
}

export class FormIncomplete extends Error {
  constructor(message: string) {
    super(message);
    this.name = "FormIncomplete";
  }
}

/** Six subscales, 0-100 in steps of 5, all required before submit. */
export class TlxFormState {
  private values = new Map<TlxField, number>();

  set(field: TlxField, value: number): void {
    if (!Number.isInteger(value) || value < 0 || value > 100 || value % 5 !== 0) {
      throw new GridViolation(`${field}=${value} is not on the 0-100 step-5 grid`);
    }
    this.values.set(field, value);
  }

  get(field: TlxField): number | undefined {
    return this.values.get(field);
  }

  get complete(): boolean {
    return TLX_FIELDS.every((field) => this.values.has(field));
  }

  get submitEnabled(): boolean {
    return this.complete;
  }

  payload(): TlxPayload {
    if (!this.complete) {
      const missing = TLX_FIELDS.filter((f) => !this.values.has(f));
      throw new FormIncomplete(`unset subscales: ${missing.join(", ")}`);
    }
    return {
      mental: this.values.get("mental")!,
      physical: this.values.get("physical")!,
      temporal: this.values.get("temporal")!,
      performance: this.values.get("performance")!,
      effort: this.values.get("effort")!,
      frustration: this.values.get("frustration")!,
    };
  }

  reset(): void {
    this.values.clear();
  }
}

/** Two 9-point items: task difficulty and mental effort. */
export class PaasFormState {
  private difficulty: number | null = null;
  private effort: number | null = null;

  setDifficulty(value: number): void {
    this.difficulty = this.checked("difficulty", value);
  }

  setEffort(value: number): void {
    this.effort = this.checked("effort", value);
  }

  private checked(name: string, value: number): number {
    if (!Number.isInteger(value) || value < 1 || value > 9) {
      throw new GridViolation(`${name}=${value} is not on the 1-9 scale`);
    }
    return value;
  }

  get complete(): boolean {
    return this.difficulty !== null && this.effort !== null;
  }

  get submitEnabled(): boolean {
    return this.complete;
  }

  payload(): PaasPayload {
    if (this.difficulty === null || this.effort === null) {
      throw new FormIncomplete("both Paas items are required");
    }
    return { difficulty: this.difficulty, effort: this.effort };
  }

  reset(): void {
    this.difficulty = null;
    this.effort = null;
  }
}
