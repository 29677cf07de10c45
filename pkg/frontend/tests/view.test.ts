// Unit tests for the pure view projection (no service, no DOM).

import { describe, expect, it } from "vitest";
import { bindingText, parseLights, renderSession, type SessionView } from "../src/view.js";
import { viewHtml } from "../src/html.js";
import type { WireSession } from "../src/types.js";

function m1Payload(): WireSession {
  return {
    id: "abc",
    model: "m1",
    format: "ebv1",
    state: {
      format: "ebv1",
      variables: [
        { name: "button", value: "DOWN" },
        { name: "phase", value: "haltdown" },
      ],
    },
    initial_count: 1,
    initial_index: 0,
    history: [],
    invariants: [
      { label: "typeof_button", holds: true, error: null },
      { label: "inv3", holds: true, error: null },
    ],
    pending_choices: null,
    enabled: [{ event: "PressUP", bindings: {}, after_states: 1 }],
  };
}

describe("renderSession", () => {
  it("projects every variable and enabled event exactly once", () => {
    const view = renderSession(m1Payload()) as SessionView;
    expect(view.kind).toBe("session");
    expect(view.variables).toEqual([
      { name: "button", value: "DOWN" },
      { name: "phase", value: "haltdown" },
    ]);
    expect(view.enabled).toHaveLength(1);
    expect(view.enabled[0].event).toBe("PressUP");
    expect(view.lights).toBeNull();
    expect(view.badges.every((b) => b.ok)).toBe(true);
  });

  it("marks a violated invariant as a red badge", () => {
    const payload = m1Payload();
    payload.invariants.push({ label: "M3_inv6", holds: false, error: null });
    const view = renderSession(payload) as SessionView;
    const badge = view.badges.find((b) => b.label === "M3_inv6")!;
    expect(badge.ok).toBe(false);
    const html = viewHtml(view);
    expect(html).toContain('class="badge bad" data-label="M3_inv6"');
  });

  it("shows the light panel only when the model defines the lights", () => {
    const payload = m1Payload();
    payload.state.variables.push({
      name: "pilot_interface_light",
      value: "{(Green |-> Off), (Orange |-> Off), (Red |-> On)}",
    });
    const view = renderSession(payload) as SessionView;
    expect(view.lights).toEqual({ Green: "Off", Orange: "Off", Red: "On" });
    const html = viewHtml(view);
    expect(html).toContain("light-on-red");
  });

  it("turns a malformed payload into an error banner, never a blank screen", () => {
    const view = renderSession({ nonsense: true });
    expect(view.kind).toBe("error");
    const html = viewHtml(view);
    expect(html).toContain("banner error");
  });

  it("builds a choice dialog from pending choices", () => {
    const payload = m1Payload();
    payload.pending_choices = {
      event: "spin",
      bindings: {},
      outcomes: [
        { format: "ebv1", variables: [{ name: "button", value: "UP" }, { name: "phase", value: "haltdown" }] },
        { format: "ebv1", variables: [{ name: "button", value: "DOWN" }, { name: "phase", value: "haltup" }] },
      ],
    };
    const view = renderSession(payload) as SessionView;
    expect(view.choice?.options).toHaveLength(2);
    expect(view.choice?.options[0].summary).toContain("button=UP");
    expect(view.choice?.options[1].summary).toContain("phase=haltup");
  });

  it("renders history entries with binding text", () => {
    const payload = m1Payload();
    payload.history = [
      { event: "closing_doors_UP", bindings: { f: "{(door_front |-> CLOSED)}" }, state: payload.state },
    ];
    const view = renderSession(payload) as SessionView;
    expect(view.history[0].bindingText).toBe("f={(door_front |-> CLOSED)}");
  });
});

describe("helpers", () => {
  it("bindingText sorts parameters", () => {
    expect(bindingText({ b: "2", a: "1" })).toBe("a=1, b=2");
  });

  it("parseLights tolerates any pair order", () => {
    expect(parseLights("{(Red |-> On), (Green |-> Off), (Orange |-> Off)}")).toEqual({
      Green: "Off",
      Orange: "Off",
      Red: "On",
    });
    expect(parseLights("{(Green |-> Off)}")).toBeNull();
  });
});
