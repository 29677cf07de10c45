// Pure projection of service responses into the view model.  No guard or
// invariant logic lives here: delete the service and the UI is inert, never
// wrong.  Everything is plain data so it tests without a DOM.

import type { WireEnabled, WirePendingChoices, WireSession, WireState } from "./types.js";

export interface VariableRow {
  name: string;
  value: string;
}

export interface EnabledEntry {
  event: string;
  bindings: Record<string, string>;
  bindingText: string;
  afterStates: number;
}

export interface Badge {
  label: string;
  ok: boolean;
  error: string | null;
}

export interface HistoryRow {
  index: number;
  event: string;
  bindingText: string;
}

export type LightName = "Green" | "Orange" | "Red";

export interface LightPanel {
  Green: string;
  Orange: string;
  Red: string;
}

export interface ChoiceOption {
  index: number;
  summary: string;
}

export interface ChoiceDialog {
  event: string;
  bindings: Record<string, string>;
  options: ChoiceOption[];
}

export interface SessionView {
  kind: "session";
  id: string;
  model: string;
  variables: VariableRow[];
  enabled: EnabledEntry[];
  badges: Badge[];
  history: HistoryRow[];
  lights: LightPanel | null;
  choice: ChoiceDialog | null;
  notice: string | null;
}

export interface ErrorView {
  kind: "error";
  message: string;
}

export type View = SessionView | ErrorView;

export function bindingText(bindings: Record<string, string>): string {
  const parts = Object.keys(bindings)
    .sort()
    .map((k) => `${k}=${bindings[k]}`);
  return parts.join(", ");
}

function varTable(state: WireState): VariableRow[] {
  return state.variables.map((v) => ({ name: v.name, value: v.value }));
}

// pilot_interface_light renders as e.g. {(Green |-> Off), (Red |-> On)};
// pull the pairs out of the canonical text (display-only, no evaluation)
export function parseLights(valueText: string): LightPanel | null {
  const panel: Partial<Record<LightName, string>> = {};
  const re = /\((Green|Orange|Red) \|-> (\w+)\)/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(valueText)) !== null) {
    panel[m[1] as LightName] = m[2];
  }
  if (panel.Green === undefined || panel.Orange === undefined || panel.Red === undefined) {
    return null;
  }
  return panel as LightPanel;
}

function summarize(before: WireState, outcome: WireState): string {
  const old = new Map(before.variables.map((v) => [v.name, v.value]));
  const changed = outcome.variables
    .filter((v) => old.get(v.name) !== v.value)
    .map((v) => `${v.name}=${v.value}`);
  return changed.length ? changed.join(", ") : "(no visible change)";
}

export function choiceDialog(current: WireState, pending: WirePendingChoices): ChoiceDialog {
  return {
    event: pending.event,
    bindings: pending.bindings,
    options: pending.outcomes.map((outcome, index) => ({
      index,
      summary: summarize(current, outcome),
    })),
  };
}

/** Project a /v1 session payload into the view model.  A malformed payload
 * yields an error view (rendered as a banner), never a blank screen. */
export function renderSession(payload: unknown, notice: string | null = null): View {
  const p = payload as WireSession;
  if (
    !p ||
    typeof p.id !== "string" ||
    !p.state ||
    p.state.format !== "ebv1" ||
    !Array.isArray(p.state.variables) ||
    !Array.isArray(p.invariants)
  ) {
    return { kind: "error", message: "unexpected response shape from the animator service" };
  }
  const variables = varTable(p.state);
  const lightVar = variables.find((v) => v.name === "pilot_interface_light");
  const enabled: EnabledEntry[] = (p.enabled ?? []).map((e: WireEnabled) => ({
    event: e.event,
    bindings: e.bindings,
    bindingText: bindingText(e.bindings),
    afterStates: e.after_states,
  }));
  return {
    kind: "session",
    id: p.id,
    model: p.model,
    variables,
    enabled,
    badges: p.invariants.map((i) => ({ label: i.label, ok: i.holds, error: i.error })),
    history: p.history.map((h, index) => ({
      index,
      event: h.event,
      bindingText: bindingText(h.bindings),
    })),
    lights: lightVar ? parseLights(lightVar.value) : null,
    choice: p.pending_choices ? choiceDialog(p.state, p.pending_choices) : null,
    notice,
  };
}
