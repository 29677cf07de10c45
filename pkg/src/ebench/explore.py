"""Reachability exploration and the semantic proof-obligation checks:
invariant preservation (INV1/INV2), feasibility (FIS), deadlock freedom,
shortest-witness search and DOT export.

All results are deterministic: BFS order with event-declaration /
canonical-binding tie-breaking, identical across engines and runs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import engine
from .engine import RunOptions, RunResult
from .evaluator import after_states, initial_states
from .limits import DEFAULT_EXPLORE_LIMITS, ExploreLimits
from .lowering import LoweredMachine, LoweredPred
from .machine import MachineDefinition, State, binding_text
from .values import Value, canonical_text


@dataclass(frozen=True)
class TraceStep:
    event: str
    bindings: Dict[str, Value]
    state: State


@dataclass(frozen=True)
class Trace:
    initial: State
    steps: Tuple[TraceStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def final(self) -> State:
        return self.steps[-1].state if self.steps else self.initial

    def pretty(self) -> str:
        lines = [f"  init: {self.initial!r}"]
        for step in self.steps:
            btxt = f" [{binding_text(step.bindings)}]" if step.bindings else ""
            lines.append(f"  {step.event}{btxt}: {step.state!r}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Violation:
    kind: str  # invariant | WellDefinedness | deadlock | FIS | absence | monitor | inevitability | refinement | ...
    label: str
    trace: Optional[Trace]
    message: str = ""


@dataclass
class Stats:
    states: int = 0
    transitions: int = 0
    wall_time: float = 0.0
    truncated: bool = False
    truncation_reason: str = ""


@dataclass
class CheckReport:
    verdict: str  # "pass" | "fail"
    violations: List[Violation] = field(default_factory=list)
    stats: Stats = field(default_factory=Stats)
    warnings: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


class TransitionSystem:
    """Reachable states and labeled transitions of a machine."""

    def __init__(self, machine: MachineDefinition, low: LoweredMachine, result: RunResult):
        self.machine = machine
        self.low = low
        self.result = result
        self._states: Dict[int, State] = {}

    @property
    def n_states(self) -> int:
        return len(self.result.states)

    @property
    def n_transitions(self) -> int:
        return self.result.n_transitions

    @property
    def truncated(self) -> bool:
        return self.result.truncated

    @property
    def truncation_reason(self) -> str:
        return self.result.truncation_reason

    @property
    def initial(self) -> List[int]:
        return [i for i, p in enumerate(self.result.pred_state) if p < 0]

    def state(self, index: int) -> State:
        s = self._states.get(index)
        if s is None:
            s = self.low.decode_state(self.result.states[index])
            self._states[index] = s
        return s

    def transitions(self) -> List[Tuple[int, str, Dict[str, Value], int]]:
        res = self.result
        out = []
        for src, ev_idx, binding_id, dst in zip(res.t_src, res.t_event, res.t_binding, res.t_dst):
            out.append((src, self.low.events[ev_idx].name, self.low.binding_of(ev_idx, binding_id), dst))
        return out

    def edges_raw(self):
        """(src, event_index, binding_id, dst) without decoding."""
        res = self.result
        return zip(res.t_src, res.t_event, res.t_binding, res.t_dst)

    def trace_to_index(self, index: int) -> Trace:
        chain = []
        i = index
        res = self.result
        while res.pred_state[i] >= 0:
            chain.append(i)
            i = res.pred_state[i]
        chain.reverse()
        steps = []
        for j in chain:
            ev = self.low.events[res.pred_event[j]]
            steps.append(TraceStep(ev.name, self.low.binding_of(ev.index, res.pred_binding[j]), self.state(j)))
        return Trace(self.state(i), tuple(steps))


# ---------------------------------------------------------------------------
# exploration entry points


def _options(limits: ExploreLimits, **kw) -> RunOptions:
    return RunOptions(
        max_states=limits.max_states,
        max_depth=-1 if limits.max_depth is None else limits.max_depth,
        **kw,
    )


def explore(
    machine: MachineDefinition,
    limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS,
    record_transitions: bool = True,
    check_invariants: bool = True,
    stop_on_violation: bool = False,
    goal: Optional[LoweredPred] = None,
    monitors: Sequence[LoweredPred] = (),
    stop_on_monitor_violation: bool = False,
    low: Optional[LoweredMachine] = None,
) -> Tuple[TransitionSystem, float]:
    low = low or LoweredMachine(machine, limits.eval)
    opts = _options(
        limits,
        record_transitions=record_transitions,
        check_invariants=check_invariants,
        stop_on_violation=stop_on_violation,
        goal=goal,
        monitors=tuple(monitors),
        stop_on_monitor_violation=stop_on_monitor_violation,
    )
    t0 = time.perf_counter()
    result = engine.run(low, opts)
    elapsed = time.perf_counter() - t0
    return TransitionSystem(machine, low, result), elapsed


def reachable(
    machine: MachineDefinition, limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS
) -> TransitionSystem:
    """Full reachable transition system (no checking)."""
    ts, _ = explore(machine, limits, record_transitions=True, check_invariants=False)
    return ts


def _stats(ts: TransitionSystem, elapsed: float) -> Stats:
    return Stats(
        states=ts.n_states,
        transitions=ts.n_transitions,
        wall_time=elapsed,
        truncated=ts.truncated,
        truncation_reason=ts.truncation_reason,
    )


def check_invariants(
    machine: MachineDefinition, limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS
) -> CheckReport:
    """Pass iff every labeled invariant (and declared variable type) holds in
    every reachable state; a failure carries all labels violated at the first
    (shortest-trace) bad state."""
    ts, elapsed = explore(
        machine, limits, record_transitions=False, check_invariants=True, stop_on_violation=True
    )
    report = CheckReport("pass", stats=_stats(ts, elapsed), warnings=list(ts.low.warnings))
    violation = ts.result.invariant_violation
    if violation is not None:
        idx, bad = violation
        trace = ts.trace_to_index(idx)
        for label, wd_error in bad:
            kind = "invariant" if wd_error is None else "WellDefinedness"
            report.violations.append(Violation(kind, label, trace, wd_error or ""))
        report.verdict = "fail"
    return report


def check_feasibility(
    machine: MachineDefinition, limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS
) -> CheckReport:
    """Pass iff every guard-true (event, binding) in every reachable state
    admits at least one after-state."""
    ts, elapsed = explore(machine, limits, record_transitions=False, check_invariants=False)
    report = CheckReport("pass", stats=_stats(ts, elapsed), warnings=list(ts.low.warnings))
    for idx, ev_idx, binding_id in ts.result.fis_violations:
        ev = ts.low.events[ev_idx]
        report.violations.append(
            Violation(
                "FIS",
                ev.name,
                ts.trace_to_index(idx),
                f"guards hold for [{binding_text(ts.low.binding_of(ev_idx, binding_id))}] but no after-state exists",
            )
        )
    if report.violations:
        report.verdict = "fail"
    return report


def check_deadlock(
    machine: MachineDefinition, limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS
) -> CheckReport:
    """Pass iff every reachable state enables at least one event with at
    least one after-state."""
    ts, elapsed = explore(machine, limits, record_transitions=False, check_invariants=False)
    report = CheckReport("pass", stats=_stats(ts, elapsed), warnings=list(ts.low.warnings))
    if not initial_states(machine, limits.eval):
        report.violations.append(Violation("EmptyInit", "INITIALISATION", None, "no initial state"))
    for idx in ts.result.deadlocks:
        report.violations.append(
            Violation("deadlock", f"state {idx}", ts.trace_to_index(idx), "no enabled event")
        )
    if report.violations:
        report.verdict = "fail"
    return report


def check_all(
    machine: MachineDefinition, limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS
) -> List[Tuple[str, CheckReport]]:
    """Invariants, deadlock freedom and feasibility from one exploration.

    The engine records the first (shortest-trace) invariant violation even
    while continuing, so the combined run reports the same counterexample as
    check_invariants at a third of the exploration cost."""
    ts, elapsed = explore(machine, limits, record_transitions=False, check_invariants=True)
    stats = _stats(ts, elapsed)
    warnings = list(ts.low.warnings)

    inv_report = CheckReport("pass", stats=stats, warnings=warnings)
    violation = ts.result.invariant_violation
    if violation is not None:
        idx, bad = violation
        trace = ts.trace_to_index(idx)
        for label, wd_error in bad:
            kind = "invariant" if wd_error is None else "WellDefinedness"
            inv_report.violations.append(Violation(kind, label, trace, wd_error or ""))
        inv_report.verdict = "fail"

    dead_report = CheckReport("pass", stats=stats, warnings=warnings)
    if not ts.initial:
        dead_report.violations.append(Violation("EmptyInit", "INITIALISATION", None, "no initial state"))
    for idx in ts.result.deadlocks:
        dead_report.violations.append(
            Violation("deadlock", f"state {idx}", ts.trace_to_index(idx), "no enabled event")
        )
    if dead_report.violations:
        dead_report.verdict = "fail"

    fis_report = CheckReport("pass", stats=stats, warnings=warnings)
    for idx, ev_idx, binding_id in ts.result.fis_violations:
        ev = ts.low.events[ev_idx]
        fis_report.violations.append(
            Violation(
                "FIS",
                ev.name,
                ts.trace_to_index(idx),
                f"guards hold for [{binding_text(ts.low.binding_of(ev_idx, binding_id))}] but no after-state exists",
            )
        )
    if fis_report.violations:
        fis_report.verdict = "fail"

    return [("invariants", inv_report), ("deadlock", dead_report), ("feasibility", fis_report)]


def trace_to(
    machine: MachineDefinition,
    goal,
    limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS,
    low: Optional[LoweredMachine] = None,
) -> Optional[Trace]:
    """Shortest trace (BFS) to a state satisfying the goal predicate, or
    None when no reachable state does."""
    low = low or LoweredMachine(machine, limits.eval)
    lowered_goal = goal if isinstance(goal, LoweredPred) else low.lower_pred("goal", goal)
    ts, _ = explore(
        machine,
        limits,
        record_transitions=False,
        check_invariants=False,
        goal=lowered_goal,
        low=low,
    )
    if ts.result.goal_state < 0:
        return None
    return ts.trace_to_index(ts.result.goal_state)


def replay_trace(machine: MachineDefinition, trace: Trace, limits=None) -> bool:
    """Check that every step's resulting state is reproduced by after_states
    of the named event under the recorded bindings."""
    from .evaluator import event_successors, guards_hold, state_env
    from .limits import DEFAULT_EVAL_LIMITS

    eval_limits = limits or DEFAULT_EVAL_LIMITS
    if trace.initial not in initial_states(machine, eval_limits):
        return False
    current = trace.initial
    for step in trace.steps:
        ev = machine.event(step.event)
        env = state_env(machine, current)
        env.update(step.bindings)
        if not guards_hold(machine, env, ev, eval_limits):
            return False
        succ = after_states(machine, current, step.bindings, ev.actions, eval_limits)
        if step.state not in succ:
            return False
        current = step.state
    return True


# ---------------------------------------------------------------------------
# DOT export


def to_dot(ts: TransitionSystem, show_vars: Optional[Sequence[str]] = None) -> str:
    """Deterministic GraphViz rendering; nodes show the selected variables."""
    names = show_vars if show_vars is not None else ts.machine.variable_names()
    lines = ["digraph reachable {", "  rankdir=LR;", '  node [shape=box, fontname="monospace"];']
    for i in range(ts.n_states):
        state = ts.state(i)
        label = "\\n".join(f"{n}={canonical_text(state.get(n))}" for n in names)
        label = label.replace('"', '\\"')
        shape = ' peripheries=2' if i in set(ts.initial) else ""
        lines.append(f'  s{i} [label="s{i}\\n{label}"{shape}];')
    for src, event_name, bindings, dst in ts.transitions():
        edge_label = event_name
        if bindings:
            edge_label += f" [{binding_text(bindings)}]"
        edge_label = edge_label.replace('"', '\\"')
        lines.append(f'  s{src} -> s{dst} [label="{edge_label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
