// Thin fetch client for the /v1 animator API.
export class ApiError extends Error {
    constructor(code, message, body) {
        super(message);
        this.code = code;
        this.body = body;
    }
}
async function request(base, path, init) {
    const response = await fetch(base + path, {
        headers: { "content-type": "application/json" },
        ...init,
    });
    if (response.status === 204) {
        return undefined;
    }
    const body = await response.json();
    if (!response.ok) {
        const err = body;
        throw new ApiError(err.code ?? `http-${response.status}`, err.message ?? "request failed", err);
    }
    return body;
}
export class Client {
    constructor(base = "") {
        this.base = base;
    }
    models() {
        return request(this.base, "/v1/models");
    }
    createSession(model, initialIndex = 0) {
        return request(this.base, "/v1/sessions", {
            method: "POST",
            body: JSON.stringify({ model, initial_index: initialIndex }),
        });
    }
    getSession(id) {
        return request(this.base, `/v1/sessions/${id}`);
    }
    fire(id, event, bindings, choice) {
        return request(this.base, `/v1/sessions/${id}/fire`, {
            method: "POST",
            body: JSON.stringify({ event, bindings, choice }),
        });
    }
    backtrack(id, steps) {
        return request(this.base, `/v1/sessions/${id}/backtrack`, {
            method: "POST",
            body: JSON.stringify({ steps }),
        });
    }
    deleteSession(id) {
        return request(this.base, `/v1/sessions/${id}`, { method: "DELETE" });
    }
}
