// Pure projection of service responses into the view model.  No guard or
// invariant logic lives here: delete the service and the UI is inert, never
// wrong.  Everything is plain data so it tests without a DOM.
export function bindingText(bindings) {
    const parts = Object.keys(bindings)
        .sort()
        .map((k) => `${k}=${bindings[k]}`);
    return parts.join(", ");
}
function varTable(state) {
    return state.variables.map((v) => ({ name: v.name, value: v.value }));
}
// pilot_interface_light renders as e.g. {(Green |-> Off), (Red |-> On)};
// pull the pairs out of the canonical text (display-only, no evaluation)
export function parseLights(valueText) {
    const panel = {};
    const re = /\((Green|Orange|Red) \|-> (\w+)\)/g;
    let m;
    while ((m = re.exec(valueText)) !== null) {
        panel[m[1]] = m[2];
    }
    if (panel.Green === undefined || panel.Orange === undefined || panel.Red === undefined) {
        return null;
    }
    return panel;
}
function summarize(before, outcome) {
    const old = new Map(before.variables.map((v) => [v.name, v.value]));
    const changed = outcome.variables
        .filter((v) => old.get(v.name) !== v.value)
        .map((v) => `${v.name}=${v.value}`);
    return changed.length ? changed.join(", ") : "(no visible change)";
}
export function choiceDialog(current, pending) {
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
export function renderSession(payload, notice = null) {
    const p = payload;
    if (!p ||
        typeof p.id !== "string" ||
        !p.state ||
        p.state.format !== "ebv1" ||
        !Array.isArray(p.state.variables) ||
        !Array.isArray(p.invariants)) {
        return { kind: "error", message: "unexpected response shape from the animator service" };
    }
    const variables = varTable(p.state);
    const lightVar = variables.find((v) => v.name === "pilot_interface_light");
    const enabled = (p.enabled ?? []).map((e) => ({
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
