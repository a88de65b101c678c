// Browser entry point.  Creates a session from the config pasted into
// the start screen, then runs the task UI against the live stream.

import { defaultAudioContext } from "./audio.js";
import { SessionClient, WsLike } from "./client.js";
import { PaasFormState, TlxFormState } from "./forms.js";
import { ApiClient } from "./http.js";
import {
  flashScreen,
  renderKeypad,
  renderLineBar,
  renderPaasForm,
  renderTlxForm,
} from "./ui.js";

function el(tag: string, className: string, text = ""): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text) {
    node.textContent = text;
  }
  return node;
}

async function startSession(root: HTMLElement, configText: string): Promise<void> {
  const httpBase = location.origin;
  const wsBase = httpBase.replace(/^http/, "ws");
  const api = new ApiClient(httpBase);

  root.textContent = "Synchronizing clock...";
  const client = await SessionClient.create(
    {
      api,
      wsBaseUrl: wsBase,
      wsFactory: (url) => new WebSocket(url) as unknown as WsLike,
      audio: defaultAudioContext(),
      onBeepFlash: () => flashScreen(document.body),
    },
    configText,
  );

  root.textContent = "";
  const status = el("div", "status");
  const problem = el("div", "problem");
  const entry = el("div", "entry mono");
  const lineBar = renderLineBar();
  const formsArea = el("div", "forms");
  root.append(status, problem, entry, lineBar.element, formsArea);

  root.append(
    renderKeypad((key) => {
      client.pressKeypad(key).catch(() => undefined);
    }),
  );

  const beepButton = el("button", "beep-button", "Heard it") as HTMLButtonElement;
  beepButton.addEventListener("click", () => {
    client.pressBeepButton().catch(() => undefined);
  });
  root.append(beepButton);

  // hold-to-raise control: state is sent on change, never per frame
  const lineButton = el("button", "line-button", "Raise") as HTMLButtonElement;
  lineButton.addEventListener("pointerdown", () => {
    client.lineButton(true).catch(() => undefined);
  });
  lineButton.addEventListener("pointerup", () => {
    client.lineButton(false).catch(() => undefined);
  });
  root.append(lineButton);

  let formsShownForPhase: number | null = null;

  const renderLoop = () => {
    const view = client.session.view;
    if (view) {
      status.textContent = `${view.mode} scene=${view.scene} phase=${view.phase ?? "-"}`;
      problem.textContent = view.problem ?? "";
      entry.textContent = client.displayedEntry();
      const sessionNow = client.session.latest?.session_ms ?? 0;
      lineBar.update(
        client.session.linePositionAt(sessionNow),
        view.line_low,
        view.line_high,
      );

      if (view.show_tlx && formsShownForPhase !== view.clock_ms) {
        formsShownForPhase = view.clock_ms;
        formsArea.textContent = "";
        const tlx = new TlxFormState();
        formsArea.append(
          renderTlxForm(tlx, () => {
            client.submitTlx(tlx).then(() => {
              formsArea.textContent = "";
              if (client.session.view?.show_paas) {
                const paas = new PaasFormState();
                formsArea.append(
                  renderPaasForm(paas, () => {
                    client.submitPaas(paas).catch(() => undefined);
                    formsArea.textContent = "";
                  }),
                );
              }
            }).catch(() => undefined);
          }),
        );
      }
    }
    if (!client.finished) {
      requestAnimationFrame(renderLoop);
    }
  };

  await client.connect();
  requestAnimationFrame(renderLoop);

  await client.waitFinished();
  const exports = await client.fetchExports();
  root.textContent = "";
  root.append(el("h2", "", "Session complete"), el("pre", "mono", exports.summary));
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  const config = el("textarea", "config") as HTMLTextAreaElement;
  config.rows = 12;
  config.value = [
    "user_id = participant",
    "scene = dual",
    "phase_duration_s = 120",
    "rng_seed = 42",
    "sensor_source = simulated",
  ].join("\n");
  const start = el("button", "start", "Start session") as HTMLButtonElement;
  start.addEventListener("click", () => {
    start.disabled = true;
    startSession(root, config.value).catch((err) => {
      root.textContent = `Failed: ${err}`;
      start.disabled = false;
    });
  });
  root.append(config, start);
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
