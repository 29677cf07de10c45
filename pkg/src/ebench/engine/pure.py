"""Pure-Python breadth-first exploration engine.

The compiled twin in _core.pyx implements the same algorithm with typed
loops; both must produce bit-identical results (state numbering included),
which the engine parity tests enforce.
"""

from __future__ import annotations

from array import array
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..lowering import LoweredMachine, LoweredPred

ENGINE_NAME = "pure"


@dataclass
class RunOptions:
    max_states: int = 1_000_000
    max_depth: int = -1  # negative: unlimited
    record_transitions: bool = True
    check_invariants: bool = True
    stop_on_violation: bool = False
    goal: Optional[LoweredPred] = None
    monitors: Tuple[LoweredPred, ...] = ()
    stop_on_monitor_violation: bool = False


@dataclass
class RunResult:
    states: List[bytes] = field(default_factory=list)
    index: Dict[bytes, int] = field(default_factory=dict)
    depth: array = field(default_factory=lambda: array("l"))
    pred_state: array = field(default_factory=lambda: array("l"))
    pred_event: array = field(default_factory=lambda: array("l"))
    pred_binding: array = field(default_factory=lambda: array("l"))
    t_src: array = field(default_factory=lambda: array("l"))
    t_event: array = field(default_factory=lambda: array("l"))
    t_binding: array = field(default_factory=lambda: array("l"))
    t_dst: array = field(default_factory=lambda: array("l"))
    n_transitions: int = 0
    truncated: bool = False
    truncation_reason: str = ""
    #: first invariant-violating state and every bad (label, wd-error) there
    invariant_violation: Optional[Tuple[int, Tuple[Tuple[str, Optional[str]], ...]]] = None
    fis_violations: List[Tuple[int, int, int]] = field(default_factory=list)
    deadlocks: List[int] = field(default_factory=list)
    goal_state: int = -1
    #: first monitor-violating state and the monitor label
    monitor_violations: List[Tuple[int, str]] = field(default_factory=list)


def _bad_labels(low: LoweredMachine, state: bytes) -> Tuple[Tuple[str, Optional[str]], ...]:
    """(label, well-definedness error or None) for every invariant not True."""
    bad = []
    for inv in low.invariants:
        verdict = inv.check(state)
        if verdict is not True:
            bad.append((inv.label, None if verdict is False else str(verdict)))
    return tuple(bad)


def run(low: LoweredMachine, opts: RunOptions) -> RunResult:
    res = RunResult()
    states = res.states
    index = res.index
    depth = res.depth
    queue = deque()
    stop = False

    def discover(data: bytes, pred: int, event_idx: int, binding_id: int, d: int) -> int:
        nonlocal stop
        idx = len(states)
        index[data] = idx
        states.append(data)
        depth.append(d)
        res.pred_state.append(pred)
        res.pred_event.append(event_idx)
        res.pred_binding.append(binding_id)
        if opts.check_invariants and res.invariant_violation is None:
            bad = _bad_labels(low, data)
            if bad:
                res.invariant_violation = (idx, bad)
                if opts.stop_on_violation:
                    stop = True
        for mon in opts.monitors:
            verdict = mon.check(data)
            if verdict is not True:
                label = mon.label if verdict is False else f"{mon.label} [wd: {verdict}]"
                res.monitor_violations.append((idx, label))
                if opts.stop_on_monitor_violation:
                    stop = True
        if opts.goal is not None and res.goal_state < 0 and opts.goal.check(data) is True:
            res.goal_state = idx
            stop = True
        return idx

    for data in low.initial_encoded():
        if data not in index:
            discover(data, -1, -1, -1, 0)
            queue.append(index[data])
            if stop:
                res.truncated = True
                res.truncation_reason = "stopped early"
                return res

    events = low.events
    width = low.n
    while queue:
        idx = queue.popleft()
        state = states[idx]
        d = depth[idx]
        if 0 <= opts.max_depth <= d:
            res.truncated = True
            res.truncation_reason = "max_depth"
            continue
        outgoing = 0
        for ev in events:
            for binding_id, deltas in ev.successors(state):
                if not deltas:
                    res.fis_violations.append((idx, ev.index, binding_id))
                    continue
                # a binding with after-states means the state is not a
                # deadlock even if the targets fall beyond the state cap
                outgoing += len(deltas)
                for delta in deltas:
                    succ = bytearray(state)
                    view = memoryview(succ).cast("I")
                    for pos, vid in delta:
                        view[pos] = vid
                    del view
                    succ_b = bytes(succ)
                    j = index.get(succ_b)
                    if j is None:
                        if len(states) >= opts.max_states:
                            res.truncated = True
                            res.truncation_reason = "max_states"
                            continue
                        j = discover(succ_b, idx, ev.index, binding_id, d + 1)
                        queue.append(j)
                    res.n_transitions += 1
                    if opts.record_transitions:
                        res.t_src.append(idx)
                        res.t_event.append(ev.index)
                        res.t_binding.append(binding_id)
                        res.t_dst.append(j)
                    if stop:
                        res.truncated = True
                        res.truncation_reason = "stopped early"
                        return res
        if outgoing == 0:
            res.deadlocks.append(idx)
    return res
