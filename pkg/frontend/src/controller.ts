// Session controller: ties the API client to the view model.  All state
// transitions go through the service; the controller only decides which
// view to show next (including the choice dialog and inline errors).

import { ApiError, Client } from "./api.js";
import { choiceDialog, renderSession, type View } from "./view.js";
import type { WireSession } from "./types.js";

export class Controller {
  view: View = { kind: "error", message: "no session" };
  private sessionId: string | null = null;
  private last: WireSession | null = null;

  constructor(private client: Client) {}

  private show(payload: WireSession, notice: string | null = null): View {
    this.last = payload;
    this.sessionId = payload.id;
    this.view = renderSession(payload, notice);
    return this.view;
  }

  async load(model: string): Promise<View> {
    try {
      return this.show(await this.client.createSession(model));
    } catch (exc) {
      this.view = { kind: "error", message: String((exc as Error).message) };
      return this.view;
    }
  }

  async fire(
    event: string,
    bindings: Record<string, string>,
    choice: number | null = null,
  ): Promise<View> {
    if (this.sessionId === null) {
      return this.view;
    }
    try {
      return this.show(await this.client.fire(this.sessionId, event, bindings, choice));
    } catch (exc) {
      if (exc instanceof ApiError && exc.code === "ChoiceRequired" && this.last) {
        // nondeterministic outcome: surface the enumerated choices
        const pending = exc.body.pending_choices!;
        const refreshed = await this.client.getSession(this.sessionId);
        this.last = refreshed;
        this.view = renderSession(refreshed, null);
        if (this.view.kind === "session") {
          this.view.choice = choiceDialog(refreshed.state, pending);
        }
        return this.view;
      }
      if (exc instanceof ApiError && exc.code === "NotEnabled") {
        // stale button: refresh the enabled list and explain inline
        const refreshed = await this.client.getSession(this.sessionId);
        return this.show(refreshed, `${event} is no longer enabled: ${exc.message}`);
      }
      this.view = { kind: "error", message: String((exc as Error).message) };
      return this.view;
    }
  }

  async backtrack(steps: number): Promise<View> {
    if (this.sessionId === null) {
      return this.view;
    }
    try {
      return this.show(await this.client.backtrack(this.sessionId, steps));
    } catch (exc) {
      if (exc instanceof ApiError) {
        const refreshed = await this.client.getSession(this.sessionId);
        return this.show(refreshed, exc.message);
      }
      throw exc;
    }
  }
}
