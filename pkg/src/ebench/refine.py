"""Semantic refinement checking by co-exploration.

For each concrete transition the checker searches real abstract witnesses
(it never trusts the refines-markers): a transition by an event mapped to an
abstract event must be matched by some abstract transition of that event
landing in a glued state; a transition by a skip-mapped event must keep the
gluing with the unchanged abstract state.  Relative deadlock freedom and
convergence of skip-mapped events (no skip-only cycle) are separate checks.

With the default gluing (identity on shared variables) the glued abstract
state is the projection of the concrete one, so the pair sets are singletons
and the whole check is per-transition local; a custom gluing predicate
switches to pair-set propagation.  A custom predicate sees abstract-only
variables and concrete variables by name; it cannot name the abstract copy
of a shared variable.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .errors import EbenchError, TruncatedSystem
from .evaluator import eval_pred
from .explore import CheckReport, Stats, Trace, TraceStep, TransitionSystem, Violation, explore
from .limits import DEFAULT_EXPLORE_LIMITS, ExploreLimits
from .lowering import LoweredMachine
from .machine import MachineDefinition, State

EventMap = Dict[str, Optional[str]]


@dataclass
class RefinementSpec:
    abstract: MachineDefinition
    concrete: MachineDefinition
    gluing: Optional[object] = None  # predicate AST; None = identity on shared vars
    event_map: EventMap = field(default_factory=dict)

    def __post_init__(self):
        if not self.event_map:
            self.event_map = derive_event_map(self.abstract, self.concrete)
        missing = [ev.name for ev in self.concrete.events if ev.name not in self.event_map]
        if missing:
            raise EbenchError(f"event map is not total; missing {missing}")
        abstract_events = set(self.abstract.event_names())
        bogus = {
            c: a for c, a in self.event_map.items() if a is not None and a not in abstract_events
        }
        if bogus:
            raise EbenchError(f"event map targets unknown abstract events: {bogus}")


def derive_event_map(abstract: MachineDefinition, concrete: MachineDefinition) -> EventMap:
    """Default mapping from refines/extends/new markers: `new` events map to
    skip; a refines-target that names an abstract event maps to it; events
    whose marker does not resolve (cross-level names) also map to skip."""
    abstract_events = set(abstract.event_names())
    mapping: EventMap = {}
    for ev in concrete.events:
        if ev.is_new:
            mapping[ev.name] = None
        elif ev.refines_event is not None and ev.refines_event in abstract_events:
            mapping[ev.name] = ev.refines_event
        elif ev.refines_event is None and ev.name in abstract_events:
            mapping[ev.name] = ev.name
        else:
            mapping[ev.name] = None
    return mapping


class _Glue:
    """Abstract-state candidates glued to a concrete state."""

    def __init__(self, spec: RefinementSpec, a_ts: TransitionSystem, c_low: LoweredMachine):
        self.spec = spec
        self.a_ts = a_ts
        self.c_low = c_low
        self.a_low = a_ts.low
        self.shared = [n for n in spec.abstract.variable_names() if n in spec.concrete.variable_names()]
        self.identity = spec.gluing is None
        if self.identity and set(self.shared) != set(spec.abstract.variable_names()):
            raise EbenchError(
                "identity gluing needs superposition (abstract variables must all "
                f"exist concretely); missing {sorted(set(spec.abstract.variable_names()) - set(self.shared))}"
            )
        # concrete position of each abstract variable, plus per-variable id maps
        self.c_pos = [self.c_low.position[n] for n in spec.abstract.variable_names()] if self.identity else []
        self._id_map: List[Dict[int, int]] = [dict() for _ in self.c_pos]
        self._proj_cache: Dict[bytes, Optional[bytes]] = {}
        if not self.identity:
            self._abstract_states = [self.a_ts.state(i) for i in range(self.a_ts.n_states)]

    def abstract_candidates(self, c_key: bytes) -> FrozenSet[bytes]:
        """Keys of reachable abstract states glued to the concrete state."""
        if self.identity:
            proj = self.project(c_key)
            if proj is not None and proj in self.a_ts.result.index:
                return frozenset((proj,))
            return frozenset()
        c_state = self.c_low.decode_state(c_key)
        out = []
        for i, a_state in enumerate(self._abstract_states):
            if self.holds(a_state, c_state):
                out.append(self.a_ts.result.states[i])
        return frozenset(out)

    def project(self, c_key: bytes) -> Optional[bytes]:
        """Identity gluing: abstract encoding of the shared-variable values."""
        cached = self._proj_cache.get(c_key)
        if cached is not None or c_key in self._proj_cache:
            return cached
        from .lowering import decode, encode

        ids = decode(c_key)
        a_ids = []
        for k, cp in enumerate(self.c_pos):
            cid = ids[cp]
            mapped = self._id_map[k].get(cid)
            if mapped is None:
                value = self.c_low.values[cp][cid]
                mapped = self.a_low.intern(k, value)
                self._id_map[k][cid] = mapped
            a_ids.append(mapped)
        key = encode(a_ids)
        self._proj_cache[c_key] = key
        return key

    def holds(self, a_state: State, c_state: State) -> bool:
        env = dict(self.spec.concrete.symbols)
        env.update(self.spec.abstract.symbols)
        env.update(zip(c_state.names, c_state.values))
        for n, v in zip(a_state.names, a_state.values):
            if n not in self.spec.concrete.variable_names():
                env[n] = v
        if self.spec.gluing is None:
            return all(a_state.get(n) == c_state.get(n) for n in self.shared)
        return eval_pred(env, self.spec.gluing)


def _abstract_adjacency(a_ts: TransitionSystem) -> Dict[Tuple[bytes, str], Set[bytes]]:
    adj: Dict[Tuple[bytes, str], Set[bytes]] = {}
    res = a_ts.result
    states = res.states
    for src, ev_idx, _b, dst in a_ts.edges_raw():
        name = a_ts.low.events[ev_idx].name
        adj.setdefault((states[src], name), set()).add(states[dst])
    return adj


def _explore_pair(
    spec: RefinementSpec, limits: ExploreLimits
) -> Tuple[TransitionSystem, TransitionSystem, float]:
    t0 = time.perf_counter()
    a_ts, _ = explore(spec.abstract, limits, record_transitions=True, check_invariants=False)
    if a_ts.truncated:
        raise TruncatedSystem(
            f"abstract machine {spec.abstract.name} did not explore fully "
            f"({a_ts.truncation_reason}); raise the limits"
        )
    c_ts, _ = explore(spec.concrete, limits, record_transitions=True, check_invariants=False)
    return a_ts, c_ts, time.perf_counter() - t0


def _stats(c_ts: TransitionSystem, elapsed: float) -> Stats:
    return Stats(
        states=c_ts.n_states,
        transitions=c_ts.n_transitions,
        wall_time=elapsed,
        truncated=c_ts.truncated,
        truncation_reason=c_ts.truncation_reason,
    )


def _step_trace(c_ts: TransitionSystem, src: int, ev_idx: int, binding_id: int, dst: int) -> Trace:
    base = c_ts.trace_to_index(src)
    ev = c_ts.low.events[ev_idx]
    step = TraceStep(ev.name, c_ts.low.binding_of(ev_idx, binding_id), c_ts.state(dst))
    return Trace(base.initial, base.steps + (step,))


def check_refinement(
    spec: RefinementSpec, limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS
) -> CheckReport:
    """Proof obligations (guard strengthening + simulation) for refined
    events and the skip obligation for new events, checked over reachable
    glued pairs.  Fails carry a concrete trace plus the stuck abstract
    state(s)."""
    a_ts, c_ts, elapsed = _explore_pair(spec, limits)
    glue = _Glue(spec, a_ts, c_ts.low)
    adj = _abstract_adjacency(a_ts)
    report = CheckReport("pass", stats=_stats(c_ts, elapsed))
    res = c_ts.result

    abstract_init_keys = frozenset(a_ts.result.states[i] for i in a_ts.initial)
    pair_sets: List[FrozenSet[bytes]] = [frozenset()] * c_ts.n_states
    for i in c_ts.initial:
        pair_sets[i] = glue.abstract_candidates(res.states[i]) & abstract_init_keys
        if not pair_sets[i]:
            report.verdict = "fail"
            report.violations.append(
                Violation(
                    "NoGluedAbstractInit",
                    "INITIALISATION",
                    Trace(c_ts.state(i)),
                    "no abstract initial state glues to this concrete initial state",
                )
            )
            return report

    # edges grouped by source for worklist propagation
    out_edges: Dict[int, List[Tuple[int, int, int, int]]] = {}
    for pos, (src, ev_idx, b_id, dst) in enumerate(c_ts.edges_raw()):
        out_edges.setdefault(src, []).append((pos, ev_idx, b_id, dst))

    worklist = deque(c_ts.initial)
    queued = set(c_ts.initial)

    while worklist:
        src = worklist.popleft()
        queued.discard(src)
        current = pair_sets[src]
        for _pos, ev_idx, b_id, dst in out_edges.get(src, ()):  # declaration order
            ev_name = c_ts.low.events[ev_idx].name
            target = spec.event_map[ev_name]
            matched: Set[bytes] = set()
            dst_key = res.states[dst]
            if target is None:
                for a_key in current:
                    if glue.identity:
                        if glue.project(dst_key) == a_key:
                            matched.add(a_key)
                    else:
                        a_state = a_ts.state(a_ts.result.index[a_key])
                        if glue.holds(a_state, c_ts.state(dst)):
                            matched.add(a_key)
                kind = "skip"
            else:
                for a_key in current:
                    for a_dst in adj.get((a_key, target), ()):  # witnesses
                        if glue.identity:
                            if glue.project(dst_key) == a_dst:
                                matched.add(a_dst)
                        else:
                            a_state = a_ts.state(a_ts.result.index[a_dst])
                            if glue.holds(a_state, c_ts.state(dst)):
                                matched.add(a_dst)
                kind = "refinement"
            if not matched:
                report.verdict = "fail"
                stuck = ", ".join(
                    repr(a_ts.state(a_ts.result.index[a])) for a in sorted(current)
                )
                what = (
                    f"skip-mapped event changes the glued abstraction (abstract state(s): {stuck})"
                    if target is None
                    else f"no abstract {target!r} transition matches (stuck abstract state(s): {stuck})"
                )
                report.violations.append(
                    Violation(kind, ev_name, _step_trace(c_ts, src, ev_idx, b_id, dst), what)
                )
                return report
            added = frozenset(matched) - pair_sets[dst]
            if added:
                pair_sets[dst] = pair_sets[dst] | added
                if dst not in queued:
                    worklist.append(dst)
                    queued.add(dst)
    return report


def check_relative_deadlock(
    spec: RefinementSpec, limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS
) -> CheckReport:
    """Pass iff no reachable concrete state is stuck while a glued abstract
    state still has an enabled event."""
    a_ts, c_ts, elapsed = _explore_pair(spec, limits)
    glue = _Glue(spec, a_ts, c_ts.low)
    report = CheckReport("pass", stats=_stats(c_ts, elapsed))
    abstract_live: Set[bytes] = set()
    seen_src = set(a_ts.result.t_src)
    for i in range(a_ts.n_states):
        if i in seen_src:
            abstract_live.add(a_ts.result.states[i])
    for idx in c_ts.result.deadlocks:
        for a_key in glue.abstract_candidates(c_ts.result.states[idx]):
            if a_key in abstract_live:
                report.verdict = "fail"
                report.violations.append(
                    Violation(
                        "relative-deadlock",
                        f"state {idx}",
                        c_ts.trace_to_index(idx),
                        f"concrete deadlock but abstract {a_ts.state(a_ts.result.index[a_key])!r} is live",
                    )
                )
    return report


def check_convergence(
    spec: RefinementSpec, limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS
) -> CheckReport:
    """'New events do not take control forever': the skip-mapped transitions
    must not form a cycle among reachable concrete states.  Fails carry the
    lasso."""
    _, c_ts, elapsed = _explore_pair(spec, limits)
    report = CheckReport("pass", stats=_stats(c_ts, elapsed))
    skip_edges: Dict[int, List[Tuple[int, int, int]]] = {}
    for src, ev_idx, b_id, dst in c_ts.edges_raw():
        if spec.event_map[c_ts.low.events[ev_idx].name] is None:
            skip_edges.setdefault(src, []).append((ev_idx, b_id, dst))

    color = bytearray(c_ts.n_states)  # 0 white, 1 on stack, 2 done
    parent: Dict[int, Tuple[int, int, int]] = {}
    for root in range(c_ts.n_states):
        if color[root] != 0:
            continue
        stack = [(root, iter(skip_edges.get(root, ())))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for ev_idx, b_id, dst in it:
                if color[dst] == 1:
                    # lasso: path to `node` plus the closing edge
                    cycle_steps = []
                    cur = node
                    chain = [(node, ev_idx, b_id, dst)]
                    while cur != dst:
                        pe = parent[cur]
                        chain.append((pe[0], pe[1], pe[2], cur))
                        cur = pe[0]
                    chain.reverse()
                    base = c_ts.trace_to_index(dst)
                    steps = list(base.steps)
                    for s, e_i, b_i, d in chain:
                        ev = c_ts.low.events[e_i]
                        steps.append(TraceStep(ev.name, c_ts.low.binding_of(e_i, b_i), c_ts.state(d)))
                    report.verdict = "fail"
                    report.violations.append(
                        Violation(
                            "convergence",
                            c_ts.low.events[ev_idx].name,
                            Trace(base.initial, tuple(steps)),
                            f"skip-mapped events cycle through state {dst}",
                        )
                    )
                    return report
                if color[dst] == 0:
                    color[dst] = 1
                    parent[dst] = (node, ev_idx, b_id)
                    stack.append((dst, iter(skip_edges.get(dst, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return report
