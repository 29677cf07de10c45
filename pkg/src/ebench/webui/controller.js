// Session controller: ties the API client to the view model.  All state
// transitions go through the service; the controller only decides which
// view to show next (including the choice dialog and inline errors).
import { ApiError } from "./api.js";
import { choiceDialog, renderSession } from "./view.js";
export class Controller {
    constructor(client) {
        this.client = client;
        this.view = { kind: "error", message: "no session" };
        this.sessionId = null;
        this.last = null;
    }
    show(payload, notice = null) {
        this.last = payload;
        this.sessionId = payload.id;
        this.view = renderSession(payload, notice);
        return this.view;
    }
    async load(model) {
        try {
            return this.show(await this.client.createSession(model));
        }
        catch (exc) {
            this.view = { kind: "error", message: String(exc.message) };
            return this.view;
        }
    }
    async fire(event, bindings, choice = null) {
        if (this.sessionId === null) {
            return this.view;
        }
        try {
            return this.show(await this.client.fire(this.sessionId, event, bindings, choice));
        }
        catch (exc) {
            if (exc instanceof ApiError && exc.code === "ChoiceRequired" && this.last) {
                // nondeterministic outcome: surface the enumerated choices
                const pending = exc.body.pending_choices;
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
            this.view = { kind: "error", message: String(exc.message) };
            return this.view;
        }
    }
    async backtrack(steps) {
        if (this.sessionId === null) {
            return this.view;
        }
        try {
            return this.show(await this.client.backtrack(this.sessionId, steps));
        }
        catch (exc) {
            if (exc instanceof ApiError) {
                const refreshed = await this.client.getSession(this.sessionId);
                return this.show(refreshed, exc.message);
            }
            throw exc;
        }
    }
}
