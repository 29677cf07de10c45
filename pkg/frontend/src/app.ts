// Browser entry: model picker + session panel, one session per tab.

import { Client } from "./api.js";
import { Controller } from "./controller.js";
import { viewHtml } from "./html.js";

const client = new Client("");
const controller = new Controller(client);

function panel(): HTMLElement {
  return document.getElementById("panel")!;
}

function repaint(): void {
  panel().innerHTML = viewHtml(controller.view);
}

async function boot(): Promise<void> {
  const picker = document.getElementById("models") as HTMLSelectElement;
  const { models } = await client.models();
  for (const m of models.filter((m) => m.kind === "machine")) {
    const opt = document.createElement("option");
    opt.value = m.name;
    opt.textContent = `${m.name} - ${m.description}`;
    picker.appendChild(opt);
  }
  document.getElementById("load")!.addEventListener("click", async () => {
    await controller.load(picker.value);
    repaint();
  });

  panel().addEventListener("click", async (ev) => {
    const target = ev.target as HTMLElement;
    const view = controller.view;
    if (view.kind !== "session") {
      return;
    }
    if (target.dataset.enabledIndex !== undefined) {
      const entry = view.enabled[Number(target.dataset.enabledIndex)];
      await controller.fire(entry.event, entry.bindings, entry.afterStates > 1 ? null : 0);
      repaint();
    } else if (target.dataset.choice !== undefined && view.choice) {
      await controller.fire(view.choice.event, view.choice.bindings, Number(target.dataset.choice));
      repaint();
    } else if (target.id === "back-one") {
      await controller.backtrack(1);
      repaint();
    } else if (target.dataset.backTo !== undefined) {
      const keep = Number(target.dataset.backTo);
      await controller.backtrack(view.history.length - keep);
      repaint();
    }
  });
}

boot().catch((exc) => {
  panel().innerHTML = `<div class="banner error">animator service unreachable: ${String(exc)}</div>`;
});
