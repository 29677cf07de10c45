"""Requirement-level property checks over transition systems.

Three property kinds cover the in-scope requirements: transition absence
(an event never fires from states matching a source predicate), state
monitors, and inevitability under blocked events (every maximal path from a
from-state reaches a goal, with the given pilot events removed).  The
requirement catalog is data: models/requirements.cat in the expression
syntax of the model language.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .catalog import _read_source, load_machine
from .errors import EbSyntaxError, EbenchError, TruncatedSystem
from .explore import (
    CheckReport,
    Stats,
    Trace,
    TraceStep,
    TransitionSystem,
    Violation,
    explore,
    trace_to,
)
from .limits import DEFAULT_EXPLORE_LIMITS, ExploreLimits
from .machine import MachineDefinition, NotP
from .parser import _Parser, tokenize


@dataclass(frozen=True)
class Absence:
    events: Tuple[str, ...]
    source: object  # predicate AST


@dataclass(frozen=True)
class Monitor:
    pred: object


@dataclass(frozen=True)
class Inevitability:
    blocked: Tuple[str, ...]
    from_pred: object
    goal: object


PropertySpec = Union[Absence, Monitor, Inevitability]


@dataclass(frozen=True)
class Requirement:
    name: str
    model: str
    prop: PropertySpec
    overlays: Tuple[str, ...] = ()
    adversarial: bool = False  # also meaningful to run without overlays,
    # where finding a counterexample is the expected outcome
    text: str = ""


# ---------------------------------------------------------------------------
# checks


def _require_complete(ts: TransitionSystem, allow_truncated: bool) -> None:
    if ts.truncated and not allow_truncated:
        raise TruncatedSystem(
            f"transition system truncated ({ts.truncation_reason}); "
            "re-run with higher limits or allow_truncated"
        )


def _ts_stats(ts: TransitionSystem) -> Stats:
    return Stats(
        states=ts.n_states,
        transitions=ts.n_transitions,
        truncated=ts.truncated,
        truncation_reason=ts.truncation_reason,
    )


def check_absence(ts: TransitionSystem, spec: Absence, allow_truncated: bool = False) -> CheckReport:
    """Pass iff no recorded transition fires a named event from a state
    satisfying the source predicate."""
    _require_complete(ts, allow_truncated)
    report = CheckReport("pass", stats=_ts_stats(ts))
    low = ts.low
    source = low.lower_pred("absence-source", spec.source)
    names = set(spec.events)
    res = ts.result
    for src, ev_idx, b_id, dst in ts.edges_raw():
        ev = low.events[ev_idx]
        if ev.name not in names:
            continue
        if source.check(res.states[src]) is True:
            base = ts.trace_to_index(src)
            step = TraceStep(ev.name, low.binding_of(ev_idx, b_id), ts.state(dst))
            report.verdict = "fail"
            report.violations.append(
                Violation(
                    "absence",
                    ev.name,
                    Trace(base.initial, base.steps + (step,)),
                    "event fired from a matching source state",
                )
            )
            return report
    return report


def check_monitor(ts: TransitionSystem, spec: Monitor, allow_truncated: bool = False) -> CheckReport:
    """Pass iff the predicate holds in every reachable state."""
    _require_complete(ts, allow_truncated)
    report = CheckReport("pass", stats=_ts_stats(ts))
    mon = ts.low.lower_pred("monitor", spec.pred)
    for i, data in enumerate(ts.result.states):
        verdict = mon.check(data)
        if verdict is not True:
            report.verdict = "fail"
            message = "monitor false" if verdict is False else f"well-definedness: {verdict}"
            report.violations.append(Violation("monitor", "monitor", ts.trace_to_index(i), message))
            return report
    return report


def find_monitor_counterexample(
    machine: MachineDefinition, spec: Monitor, limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS
) -> Optional[Trace]:
    """Shortest trace to a monitor-violating state (adversarial mode)."""
    return trace_to(machine, NotP(spec.pred), limits)


def check_inevitability(
    machine: MachineDefinition,
    spec: Inevitability,
    limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS,
) -> CheckReport:
    """In the sub-system without the blocked events: from every reachable
    from-state, every maximal path must reach a goal state.  Fails carry a
    lasso (cycle avoiding the goal) or a trace to a non-goal terminal."""
    unknown = set(spec.blocked) - set(machine.event_names())
    if unknown:
        raise EbenchError(f"blocked events not in machine: {sorted(unknown)}")
    ts, _ = explore(machine, limits, record_transitions=True, check_invariants=False)
    _require_complete(ts, allow_truncated=False)
    report = CheckReport("pass", stats=_ts_stats(ts))
    low = ts.low
    from_pred = low.lower_pred("from", spec.from_pred)
    goal_pred = low.lower_pred("goal", spec.goal)
    res = ts.result

    blocked_idx = {i for i, ev in enumerate(low.events) if ev.name in set(spec.blocked)}
    sub_edges: Dict[int, List[Tuple[int, int, int]]] = {}
    for src, ev_idx, b_id, dst in ts.edges_raw():
        if ev_idx not in blocked_idx:
            sub_edges.setdefault(src, []).append((ev_idx, b_id, dst))

    is_goal = [goal_pred.check(data) is True for data in res.states]
    from_states = [i for i, data in enumerate(res.states) if from_pred.check(data) is True]

    parent: Dict[int, Tuple[int, int, int]] = {}

    def sub_trace(end: int) -> Trace:
        # walk the DFS parent chain back to its (parentless) region root,
        # then prefix the BFS trace from an initial state to that root
        chain = []
        cur = end
        while cur in parent:
            pe = parent[cur]
            chain.append((pe[1], pe[2], cur))
            cur = pe[0]
        chain.reverse()
        base = ts.trace_to_index(cur)
        steps = list(base.steps)
        for ev_idx, b_id, node in chain:
            ev = low.events[ev_idx]
            steps.append(TraceStep(ev.name, low.binding_of(ev_idx, b_id), ts.state(node)))
        return Trace(base.initial, tuple(steps))

    # one DFS forest per from-state region, goal states are absorbing
    color = bytearray(ts.n_states)  # 0 unseen, 1 on stack, 2 done
    for root in from_states:
        if is_goal[root] or color[root] == 2:
            continue
        if color[root] == 0:
            color[root] = 1
            stack = [(root, iter(sub_edges.get(root, ())))]
            if not sub_edges.get(root):
                report.verdict = "fail"
                report.violations.append(
                    Violation(
                        "inevitability-terminal",
                        "terminal",
                        ts.trace_to_index(root),
                        "maximal path ends before reaching the goal",
                    )
                )
                return report
            while stack:
                node, it = stack[-1]
                advanced = False
                for ev_idx, b_id, dst in it:
                    if is_goal[dst]:
                        continue
                    if color[dst] == 1:
                        lasso = sub_trace(node)
                        ev = low.events[ev_idx]
                        closing = TraceStep(ev.name, low.binding_of(ev_idx, b_id), ts.state(dst))
                        report.verdict = "fail"
                        report.violations.append(
                            Violation(
                                "inevitability-lasso",
                                ev.name,
                                Trace(lasso.initial, lasso.steps + (closing,)),
                                f"cycle avoiding the goal re-enters state {dst}",
                            )
                        )
                        return report
                    if color[dst] == 0:
                        color[dst] = 1
                        parent[dst] = (node, ev_idx, b_id)
                        outgoing = sub_edges.get(dst)
                        if not outgoing:
                            report.verdict = "fail"
                            report.violations.append(
                                Violation(
                                    "inevitability-terminal",
                                    "terminal",
                                    sub_trace(dst),
                                    "maximal path ends before reaching the goal",
                                )
                            )
                            return report
                        stack.append((dst, iter(outgoing)))
                        advanced = True
                        break
                if not advanced:
                    color[node] = 2
                    stack.pop()
    return report


# ---------------------------------------------------------------------------
# requirement catalog


def _at_word(p: _Parser, word: str) -> bool:
    t = p.peek()
    return t.kind == "ident" and t.text == word


def _expect_word(p: _Parser, word: str) -> None:
    t = p.peek()
    if not _at_word(p, word):
        raise EbSyntaxError(t.span, repr(word), repr(t.text or t.kind))
    p.next()


def parse_requirements(text: str, file: str = "<requirements>") -> Dict[str, Requirement]:
    p = _Parser(tokenize(text, file))
    out: Dict[str, Requirement] = {}
    p.skip_newlines()
    while _at_word(p, "requirement"):
        p.next()
        name = p.expect_ident("a requirement name").text
        p.expect_kw("on")
        model = p.expect_ident("a model name").text
        overlays: List[str] = []
        adversarial = False
        while True:
            if p.at_kw("overlay"):
                p.next()
                overlays.append(p.expect_ident("an overlay name").text)
            elif _at_word(p, "adversarial"):
                p.next()
                adversarial = True
            else:
                break
        p.expect_newline()
        prop: Optional[PropertySpec] = None
        tok = p.peek()
        if _at_word(p, "absence"):
            p.next()
            events = [p.expect_ident("an event name").text]
            while p.at_sym(","):
                p.next()
                events.append(p.expect_ident("an event name").text)
            _expect_word(p, "from")
            source = p.parse_pred()
            p.expect_newline()
            prop = Absence(tuple(events), source)
        elif _at_word(p, "monitor"):
            p.next()
            pred = p.parse_pred()
            p.expect_newline()
            prop = Monitor(pred)
        elif _at_word(p, "inevitability"):
            p.next()
            blocked: List[str] = []
            if _at_word(p, "blocked"):
                p.next()
                blocked.append(p.expect_ident("an event name").text)
                while p.at_sym(","):
                    p.next()
                    blocked.append(p.expect_ident("an event name").text)
            p.expect_newline()
            _expect_word(p, "from")
            from_pred = p.parse_pred()
            p.expect_newline()
            _expect_word(p, "goal")
            goal = p.parse_pred()
            p.expect_newline()
            prop = Inevitability(tuple(blocked), from_pred, goal)
        else:
            raise EbSyntaxError(tok.span, "'absence', 'monitor' or 'inevitability'")
        p.skip_newlines()
        p.expect_kw("end")
        p.expect_newline()
        p.skip_newlines()
        if name in out:
            raise EbenchError(f"duplicate requirement {name!r}")
        out[name] = Requirement(name, model, prop, tuple(overlays), adversarial)
    t = p.peek()
    if t.kind != "eof":
        raise EbSyntaxError(t.span, "'requirement' or end of file")
    return out


def builtin_requirements() -> Dict[str, Requirement]:
    """The shipped nine-requirement catalog (models/requirements.cat)."""
    return parse_requirements(_read_source("requirements.cat"), "requirements.cat")


def run_requirement(
    req: Requirement,
    limits: ExploreLimits = DEFAULT_EXPLORE_LIMITS,
    adversarial: bool = False,
    allow_truncated: bool = False,
) -> CheckReport:
    """Check one requirement.  In adversarial mode the overlays are dropped
    and a found counterexample is the PASS condition."""
    if adversarial:
        if not isinstance(req.prop, Monitor):
            raise EbenchError(f"{req.name}: adversarial mode applies to monitors")
        machine = load_machine(req.model)
        trace = find_monitor_counterexample(machine, req.prop, limits)
        if trace is None:
            return CheckReport(
                "fail",
                [Violation("adversarial", req.name, None, "no counterexample found (expected one)")],
            )
        report = CheckReport("pass")
        report.violations.append(
            Violation("counterexample", req.name, trace, "unconstrained model violates the monitor")
        )
        return report
    machine = load_machine(req.model, overlays=req.overlays)
    if isinstance(req.prop, Inevitability):
        return check_inevitability(machine, req.prop, limits)
    if isinstance(req.prop, Monitor):
        # streaming monitor check during exploration (bounded for m7-scale)
        from .lowering import LoweredMachine

        low = LoweredMachine(machine, limits.eval)
        mon = low.lower_pred(req.name, req.prop.pred)
        ts, elapsed = explore(
            machine,
            limits,
            record_transitions=False,
            check_invariants=False,
            monitors=(mon,),
            stop_on_monitor_violation=True,
            low=low,
        )
        if ts.truncated and ts.truncation_reason not in ("stopped early",) and not allow_truncated:
            raise TruncatedSystem(
                f"{req.name}: exploration truncated ({ts.truncation_reason}); "
                "pass allow_truncated for a bounded verdict"
            )
        report = CheckReport("pass", stats=_ts_stats(ts))
        report.stats.wall_time = elapsed
        for idx, label in ts.result.monitor_violations:
            report.verdict = "fail"
            report.violations.append(
                Violation("monitor", label, ts.trace_to_index(idx), "monitor false")
            )
        return report
    ts, _ = explore(machine, limits, record_transitions=True, check_invariants=False)
    return check_absence(ts, req.prop, allow_truncated=allow_truncated)
