// Wire types of the /v1 animator API (docs/api.md).  State values arrive as
// canonical ebv1 text; the client renders them and never evaluates anything.

export interface WireVariable {
  name: string;
  value: string;
}

export interface WireState {
  format: string;
  variables: WireVariable[];
}

export interface WireEnabled {
  event: string;
  bindings: Record<string, string>;
  after_states: number;
}

export interface WireInvariant {
  label: string;
  holds: boolean;
  error: string | null;
}

export interface WireHistoryEntry {
  event: string;
  bindings: Record<string, string>;
  state: WireState;
}

export interface WirePendingChoices {
  event: string;
  bindings: Record<string, string>;
  outcomes: WireState[];
}

export interface WireSession {
  id: string;
  model: string;
  format: string;
  state: WireState;
  initial_count: number;
  initial_index: number;
  history: WireHistoryEntry[];
  invariants: WireInvariant[];
  pending_choices: WirePendingChoices | null;
  enabled?: WireEnabled[];
}

export interface WireError {
  code: string;
  message: string;
  pending_choices?: WirePendingChoices;
}

export interface ModelEntry {
  name: string;
  kind: string;
  provenance: string;
  description: string;
}
