"""Lowering machines to the engines' integer-state representation.

A state becomes a flat array of per-variable value ids (interned lazily, in
first-seen order, which is deterministic because exploration is).  Every
event and predicate carries the tuple of variable positions it reads;
successor sets and truth values are memoized per projection, so the BFS
inner loop is table lookups and the generic evaluator only runs on misses.

Encoded states are little-endian uint32 arrays as bytes, so they hash fast
and stay compact at a million states.
"""

from __future__ import annotations

import itertools
from array import array
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import EvalTypeError
from .evaluator import (
    GUARD_FALSE_ERRORS,
    _action_updates,
    _member_fast,
    enumerate_type,
    eval_pred,
    guards_hold,
    initial_states,
    param_bindings_iter,
)
from .limits import DEFAULT_EVAL_LIMITS, EvalLimits
from .machine import (
    BeforeAfter,
    EventDefinition,
    MachineDefinition,
    State,
    assigned_vars,
    binding_text,
    free_names,
)
from .values import Value

Delta = Tuple[Tuple[int, int], ...]


def encode(ids: Sequence[int]) -> bytes:
    return array("I", ids).tobytes()


def decode(data: bytes) -> array:
    a = array("I")
    a.frombytes(data)
    return a


class LoweredEvent:
    __slots__ = ("event", "index", "name", "read_pos", "memo", "bindings", "_binding_ids", "low")

    def __init__(self, low: "LoweredMachine", event: EventDefinition, index: int):
        self.low = low
        self.event = event
        self.index = index
        self.name = event.name
        vars_set = set(low.names)
        read = set()
        for b in event.params:
            read |= free_names(b.domain) & vars_set
        for _, pred in event.guards:
            read |= free_names(pred) & vars_set
        for act in event.actions:
            node = getattr(act, "expr", None) or getattr(act, "set_expr", None) or act.pred
            read |= free_names(node) & vars_set
        self.read_pos = tuple(sorted(low.position[name] for name in read))
        #: projection -> ((binding_id, (delta, ...)), ...); empty delta tuple
        #: for a binding means the guards hold but no after-state exists (FIS)
        self.memo: Dict[bytes, Tuple[Tuple[int, Tuple[Delta, ...]], ...]] = {}
        self.bindings: List[Dict[str, Value]] = []
        self._binding_ids: Dict[str, int] = {}

    def _binding_id(self, binding: Dict[str, Value]) -> int:
        key = binding_text(binding)
        bid = self._binding_ids.get(key)
        if bid is None:
            bid = len(self.bindings)
            self._binding_ids[key] = bid
            self.bindings.append(dict(binding))
        return bid

    def compute(self, proj_key: bytes) -> Tuple[Tuple[int, Tuple[Delta, ...]], ...]:
        """Slow path: evaluate guards and actions for one projection."""
        low = self.low
        proj = decode(proj_key)
        env = dict(low.symbols)
        for pos, vid in zip(self.read_pos, proj):
            env[low.names[pos]] = low.values[pos][vid]
        out = []
        for binding in param_bindings_iter(low.machine, env, self.event, low.limits):
            benv = dict(env)
            benv.update(binding)
            if not guards_hold(low.machine, benv, self.event, low.limits, low.warnings):
                continue
            deltas = self._deltas(benv)
            out.append((self._binding_id(binding), deltas))
        result = tuple(out)
        self.memo[proj_key] = result
        return result

    def _deltas(self, env: Dict[str, Value]) -> Tuple[Delta, ...]:
        low = self.low
        per_action = [
            _action_updates(low.machine, env, act, low.limits) for act in self.event.actions
        ]
        seen = set()
        deltas: List[Delta] = []
        for combo in itertools.product(*per_action):
            delta = tuple(
                sorted(
                    (low.position[var], low.intern(low.position[var], value))
                    for updates in combo
                    for var, value in updates
                )
            )
            if delta not in seen:
                seen.add(delta)
                deltas.append(delta)
        return tuple(deltas)

    def successors_key(self, proj_key: bytes) -> Tuple[Tuple[int, Tuple[Delta, ...]], ...]:
        hit = self.memo.get(proj_key)
        if hit is None:
            hit = self.compute(proj_key)
        return hit

    def successors(self, state: bytes) -> Tuple[Tuple[int, Tuple[Delta, ...]], ...]:
        return self.successors_key(project(state, self.read_pos))


def project(state: bytes, positions: Tuple[int, ...]) -> bytes:
    view = memoryview(state).cast("I")
    return encode([view[p] for p in positions])


class LoweredPred:
    """Predicate over machine variables with a per-projection truth memo.

    The verdict is True, False, or an error string (well-definedness
    failure); callers decide whether an error is a violation or a warning.
    """

    __slots__ = ("low", "label", "read_pos", "memo", "fn")

    def __init__(self, low: "LoweredMachine", label: str, positions: Tuple[int, ...], fn):
        self.low = low
        self.label = label
        self.read_pos = positions
        self.memo: Dict[bytes, object] = {}
        self.fn = fn

    def check_key(self, key: bytes) -> object:
        verdict = self.memo.get(key)
        if verdict is None:
            proj = decode(key)
            env = dict(self.low.symbols)
            for pos, vid in zip(self.read_pos, proj):
                env[self.low.names[pos]] = self.low.values[pos][vid]
            try:
                verdict = bool(self.fn(env))
            except GUARD_FALSE_ERRORS as exc:
                verdict = f"{type(exc).__name__}: {exc}"
            self.memo[key] = verdict
        return verdict

    def check(self, state: bytes) -> object:
        return self.check_key(project(state, self.read_pos))


class LoweredMachine:
    def __init__(self, machine: MachineDefinition, limits: EvalLimits = DEFAULT_EVAL_LIMITS):
        self.machine = machine
        self.limits = limits
        self.symbols = dict(machine.symbols)
        self.names = machine.variable_names()
        self.n = len(self.names)
        self.position = {name: i for i, name in enumerate(self.names)}
        self.interns: List[Dict[bytes, int]] = [dict() for _ in self.names]
        self.values: List[List[Value]] = [[] for _ in self.names]
        self.warnings: List[str] = []
        self.events = [LoweredEvent(self, ev, i) for i, ev in enumerate(machine.events)]
        self.invariants: List[LoweredPred] = []
        for v in machine.variables:
            pos = (self.position[v.name],)
            self.invariants.append(
                LoweredPred(self, f"typeof_{v.name}", pos, self._type_checker(v.name, v.type_expr))
            )
        vars_set = set(self.names)
        for label, pred in machine.invariants:
            positions = tuple(sorted(self.position[n] for n in free_names(pred) & vars_set))
            self.invariants.append(
                LoweredPred(self, label, positions, lambda env, p=pred: eval_pred(env, p, limits))
            )

    def _type_checker(self, name: str, type_expr) -> Callable:
        def check(env: Dict[str, Value]) -> bool:
            value = env[name]
            fast = _member_fast(env, value, type_expr, self.limits)
            if fast is None:
                fast = value in enumerate_type(env, type_expr, self.limits)
            return bool(fast)

        return check

    def lower_pred(self, label: str, pred) -> LoweredPred:
        vars_set = set(self.names)
        unknown = free_names(pred) - vars_set - set(self.symbols)
        if unknown:
            raise EvalTypeError(f"predicate {label!r} references unknown names {sorted(unknown)}")
        positions = tuple(sorted(self.position[n] for n in free_names(pred) & vars_set))
        return LoweredPred(self, label, positions, lambda env: eval_pred(env, pred, self.limits))

    def intern(self, pos: int, value: Value) -> int:
        key = value.sort_key()
        table = self.interns[pos]
        vid = table.get(key)
        if vid is None:
            vid = len(self.values[pos])
            table[key] = vid
            self.values[pos].append(value)
        return vid

    def encode_state(self, state: State) -> bytes:
        return encode([self.intern(i, v) for i, v in enumerate(state.values)])

    def decode_state(self, data: bytes) -> State:
        ids = decode(data)
        return State(self.names, [self.values[i][vid] for i, vid in enumerate(ids)])

    def initial_encoded(self) -> List[bytes]:
        return [self.encode_state(s) for s in initial_states(self.machine, self.limits)]

    def binding_of(self, event_index: int, binding_id: int) -> Dict[str, Value]:
        return self.events[event_index].bindings[binding_id]
