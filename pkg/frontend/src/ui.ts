// DOM widgets for the participant screen.  Pure construction helpers;
// all state they show lives in the models from session.ts / forms.ts.

import { PaasFormState, TlxFormState, TLX_FIELDS, TlxField } from "./forms.js";

const TLX_LABELS: Record<TlxField, string> = {
  mental: "Mental demand",
  physical: "Physical demand",
  temporal: "Temporal demand",
  performance: "Performance",
  effort: "Effort",
  frustration: "Frustration",
};

export type SliderProps = {
  label: string;
  min: number;
  max: number;
  step: number;
  onCommit: (value: number) => void;
};

export function slider(props: SliderProps): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "slider-row";

  const title = document.createElement("span");
  title.textContent = props.label;

  const value = document.createElement("span");
  value.className = "mono";
  value.textContent = "-";

  const input = document.createElement("input");
  input.type = "range";
  input.min = String(props.min);
  input.max = String(props.max);
  input.step = String(props.step);

  input.addEventListener("input", () => {
    value.textContent = input.value;
    props.onCommit(Number(input.value));
  });

  wrap.append(title, value, input);
  return wrap;
}

export function renderTlxForm(
  form: TlxFormState,
  onSubmit: () => void,
): HTMLElement {
  const box = document.createElement("form");
  box.className = "tlx-form";

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Submit ratings";
  submit.disabled = true;

  for (const field of TLX_FIELDS) {
    box.append(
      slider({
        label: TLX_LABELS[field],
        min: 0,
        max: 100,
        step: 5,
        onCommit: (v) => {
          form.set(field, v);
          submit.disabled = !form.submitEnabled;
        },
      }),
    );
  }

  box.append(submit);
  box.addEventListener("submit", (ev) => {
    ev.preventDefault();
    if (form.submitEnabled) {
      onSubmit();
    }
  });
  return box;
}

export function renderPaasForm(
  form: PaasFormState,
  onSubmit: () => void,
): HTMLElement {
  const box = document.createElement("form");
  box.className = "paas-form";

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Submit";
  submit.disabled = true;

  box.append(
    slider({
      label: "Task difficulty",
      min: 1,
      max: 9,
      step: 1,
      onCommit: (v) => {
        form.setDifficulty(v);
        submit.disabled = !form.submitEnabled;
      },
    }),
    slider({
      label: "Mental effort",
      min: 1,
      max: 9,
      step: 1,
      onCommit: (v) => {
        form.setEffort(v);
        submit.disabled = !form.submitEnabled;
      },
    }),
    submit,
  );
  box.addEventListener("submit", (ev) => {
    ev.preventDefault();
    if (form.submitEnabled) {
      onSubmit();
    }
  });
  return box;
}

const KEYPAD_LAYOUT = ["7", "8", "9", "4", "5", "6", "1", "2", "3", "clear", "0", "submit"];

export function renderKeypad(onKey: (key: string) => void): HTMLElement {
  const grid = document.createElement("div");
  grid.className = "keypad";
  for (const key of KEYPAD_LAYOUT) {
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = key;
    button.addEventListener("click", () => onKey(key));
    grid.append(button);
  }
  return grid;
}

export interface LineBar {
  element: HTMLElement;
  update(position: number | null, low: number | null, high: number | null): void;
}

export function renderLineBar(): LineBar {
  const element = document.createElement("div");
  element.className = "line-bar";

  const band = document.createElement("div");
  band.className = "line-band";
  const marker = document.createElement("div");
  marker.className = "line-marker";
  element.append(band, marker);

  return {
    element,
    update(position, low, high) {
      if (low !== null && high !== null) {
        band.style.bottom = `${low * 100}%`;
        band.style.height = `${(high - low) * 100}%`;
      }
      if (position === null) {
        marker.style.display = "none";
      } else {
        marker.style.display = "block";
        marker.style.bottom = `${position * 100}%`;
      }
    },
  };
}

export function flashScreen(target: HTMLElement): void {
  target.classList.add("beep-flash");
  setTimeout(() => target.classList.remove("beep-flash"), 150);
}
