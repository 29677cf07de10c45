"""Animation sessions: load a machine, inspect enabled events, fire chosen
events (picking outcomes of nondeterministic ones), backtrack.

Sessions live in memory and are evicted after an idle timeout.  Operations
on one session are serialized through its lock; concurrent callers queue.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .catalog import load_contexts, load_machine
from .errors import BadChoice, EmptyInit, NotEnabled, TooFar, UnknownSession
from .evaluator import (
    event_successors,
    guards_hold,
    initial_states,
    invariant_status,
    state_env,
)
from .limits import DEFAULT_EVAL_LIMITS
from .machine import MachineDefinition, State, binding_text
from .parser import parse_machine
from .values import Value, canonical_text, parse_value

IDLE_TIMEOUT = 30 * 60.0


@dataclass
class HistoryEntry:
    event: str
    bindings: Dict[str, Value]
    state: State


@dataclass
class PendingChoice:
    event: str
    bindings: Dict[str, Value]
    outcomes: List[State]


@dataclass
class Session:
    id: str
    model: str
    machine: MachineDefinition
    initial: State
    initial_count: int
    initial_index: int
    history: List[HistoryEntry] = field(default_factory=list)
    pending: Optional[PendingChoice] = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_touch: float = field(default_factory=time.monotonic)

    @property
    def current(self) -> State:
        return self.history[-1].state if self.history else self.initial

    def touch(self) -> None:
        self.last_touch = time.monotonic()

    def enabled(self) -> List[Tuple[str, Dict[str, Value], int]]:
        """Guard-true (event, binding) pairs with their after-state counts,
        in event-declaration then canonical-binding order."""
        out = []
        for ev in self.machine.events:
            for binding, succs in event_successors(self.machine, self.current, ev):
                if succs:
                    out.append((ev.name, binding, len(succs)))
        return out

    def outcomes(self, event_name: str, bindings: Dict[str, Value]) -> List[State]:
        ev = self.machine.event(event_name)
        env = state_env(self.machine, self.current)
        env.update(bindings)
        if len(bindings) != len(ev.params) or any(b.name not in bindings for b in ev.params):
            raise NotEnabled(f"{event_name} expects bindings for {[b.name for b in ev.params]}")
        if not guards_hold(self.machine, env, ev):
            raise NotEnabled(f"{event_name} is not enabled in the current state")
        from .evaluator import after_states

        return after_states(self.machine, self.current, bindings, ev.actions)

    def fire(
        self, event_name: str, bindings: Dict[str, Value], choice: Optional[int] = None
    ) -> State:
        """Fire an enabled event.  For a nondeterministic outcome without an
        explicit choice, records pending choices and raises BadChoice."""
        outcomes = self.outcomes(event_name, bindings)
        if not outcomes:
            raise NotEnabled(f"{event_name} has no after-state here (feasibility violation)")
        if choice is None:
            if len(outcomes) > 1:
                self.pending = PendingChoice(event_name, dict(bindings), outcomes)
                raise BadChoice(
                    f"{event_name} has {len(outcomes)} outcomes; pass a choice index"
                )
            choice = 0
        if not 0 <= choice < len(outcomes):
            raise BadChoice(f"choice {choice} out of range (0..{len(outcomes) - 1})")
        new_state = outcomes[choice]
        self.history.append(HistoryEntry(event_name, dict(bindings), new_state))
        self.pending = None
        return new_state

    def backtrack(self, steps: int) -> State:
        if steps < 0 or steps > len(self.history):
            raise TooFar(f"cannot backtrack {steps} steps; history has {len(self.history)}")
        if steps:
            del self.history[len(self.history) - steps :]
        self.pending = None
        return self.current

    def invariants(self) -> Dict[str, object]:
        return invariant_status(self.machine, self.current)


class SessionStore:
    def __init__(self, idle_timeout: float = IDLE_TIMEOUT):
        self._sessions: Dict[str, Session] = {}
        self._lock = threading.Lock()
        self.idle_timeout = idle_timeout

    def sweep(self) -> None:
        cutoff = time.monotonic() - self.idle_timeout
        with self._lock:
            stale = [sid for sid, s in self._sessions.items() if s.last_touch < cutoff]
            for sid in stale:
                del self._sessions[sid]

    def create(
        self,
        model: Optional[str] = None,
        text: Optional[str] = None,
        initial_index: int = 0,
    ) -> Session:
        self.sweep()
        if text is not None:
            machine = parse_machine(text, load_contexts(), file="<inline>")
            model_name = machine.name
        elif model is not None:
            machine = load_machine(model)
            model_name = model
        else:
            raise EmptyInit("create_session needs a model name or inline text")
        inits = initial_states(machine, DEFAULT_EVAL_LIMITS)
        if not inits:
            raise EmptyInit(f"{model_name} has no initial state")
        if not 0 <= initial_index < len(inits):
            raise BadChoice(f"initial_index {initial_index} out of range (0..{len(inits) - 1})")
        session = Session(
            id=uuid.uuid4().hex,
            model=model_name,
            machine=machine,
            initial=inits[initial_index],
            initial_count=len(inits),
            initial_index=initial_index,
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        self.sweep()
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r} (expired or never created)")
        session.touch()
        return session

    def delete(self, session_id: str) -> None:
        with self._lock:
            if session_id not in self._sessions:
                raise UnknownSession(f"no session {session_id!r}")
            del self._sessions[session_id]

    def count(self) -> int:
        return len(self._sessions)


# ---------------------------------------------------------------------------
# wire rendering (canonical ebv1 text inside a JSON envelope)


def state_payload(state: State) -> dict:
    return {
        "format": "ebv1",
        "variables": [
            {"name": n, "value": canonical_text(v)} for n, v in zip(state.names, state.values)
        ],
    }


def bindings_payload(bindings: Dict[str, Value]) -> Dict[str, str]:
    return {n: canonical_text(v) for n, v in sorted(bindings.items())}


def parse_bindings(payload: Optional[Dict[str, str]]) -> Dict[str, Value]:
    return {n: parse_value(t) for n, t in (payload or {}).items()}


def enabled_payload(session: Session) -> List[dict]:
    return [
        {"event": name, "bindings": bindings_payload(binding), "after_states": count}
        for name, binding, count in session.enabled()
    ]


def session_payload(session: Session, include_enabled: bool = True) -> dict:
    body = {
        "id": session.id,
        "model": session.model,
        "format": "ebv1",
        "state": state_payload(session.current),
        "initial_count": session.initial_count,
        "initial_index": session.initial_index,
        "history": [
            {
                "event": h.event,
                "bindings": bindings_payload(h.bindings),
                "state": state_payload(h.state),
            }
            for h in session.history
        ],
        "invariants": [
            {"label": label, "holds": verdict if isinstance(verdict, bool) else False,
             "error": None if isinstance(verdict, bool) else str(verdict)}
            for label, verdict in session.invariants().items()
        ],
        "pending_choices": None,
    }
    if session.pending is not None:
        body["pending_choices"] = {
            "event": session.pending.event,
            "bindings": bindings_payload(session.pending.bindings),
            "outcomes": [state_payload(s) for s in session.pending.outcomes],
        }
    if include_enabled:
        body["enabled"] = enabled_payload(session)
    return body
