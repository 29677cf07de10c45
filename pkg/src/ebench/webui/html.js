// View model -> HTML string.  Pure, so it is testable without a DOM; app.ts
// pours the string into the page and wires event delegation.
export function esc(text) {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}
function lightBulb(color, state) {
    const on = state === "On";
    return `<span class="light ${on ? "light-on-" + color.toLowerCase() : "light-off"}" data-light="${color}">
    ${color}: ${esc(state)}</span>`;
}
export function viewHtml(view) {
    if (view.kind === "error") {
        return `<div class="banner error" role="alert">${esc(view.message)}</div>`;
    }
    const rows = view.variables
        .map((v) => `<tr><td class="var">${esc(v.name)}</td><td class="val">${esc(v.value)}</td></tr>`)
        .join("");
    const badges = view.badges
        .map((b) => {
        const cls = b.ok ? "badge ok" : "badge bad";
        const title = b.error ? ` title="${esc(b.error)}"` : "";
        return `<span class="${cls}" data-label="${esc(b.label)}"${title}>${esc(b.label)}</span>`;
    })
        .join(" ");
    const enabled = view.enabled
        .map((e, i) => {
        const detail = e.bindingText ? ` <small>[${esc(e.bindingText)}]</small>` : "";
        const multi = e.afterStates > 1 ? ` <small>(${e.afterStates} outcomes)</small>` : "";
        return `<button class="fire" data-enabled-index="${i}">${esc(e.event)}${detail}${multi}</button>`;
    })
        .join(" ");
    const history = view.history
        .map((h) => `<li>${esc(h.event)}${h.bindingText ? ` <small>[${esc(h.bindingText)}]</small>` : ""}
         <button class="rewind" data-back-to="${h.index}">rewind</button></li>`)
        .join("");
    const lights = view.lights
        ? `<div id="lights">${lightBulb("Green", view.lights.Green)} ${lightBulb("Orange", view.lights.Orange)} ${lightBulb("Red", view.lights.Red)}</div>`
        : "";
    const choice = view.choice
        ? `<div class="banner choice" id="choice-dialog">
         <p>${esc(view.choice.event)} has ${view.choice.options.length} outcomes:</p>
         ${view.choice.options
            .map((o) => `<button class="choose" data-choice="${o.index}">#${o.index}: ${esc(o.summary)}</button>`)
            .join(" ")}
       </div>`
        : "";
    const notice = view.notice ? `<div class="banner notice">${esc(view.notice)}</div>` : "";
    return `
  <section id="session" data-session="${esc(view.id)}" data-model="${esc(view.model)}">
    <h2>${esc(view.model)}</h2>
    ${notice}
    ${choice}
    ${lights}
    <div class="cols">
      <div>
        <h3>state</h3>
        <table id="variables">${rows}</table>
        <h3>invariants</h3>
        <div id="badges">${badges}</div>
      </div>
      <div>
        <h3>enabled events</h3>
        <div id="enabled">${enabled.length ? enabled : "<em>none (deadlock)</em>"}</div>
        <h3>history (${view.history.length})</h3>
        <ol id="history">${history}</ol>
        <button id="back-one" ${view.history.length ? "" : "disabled"}>step back</button>
      </div>
    </div>
  </section>`;
}
