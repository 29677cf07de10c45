"""Engine parity: the compiled core and the pure-Python engine must produce
bit-identical runs (state numbering, transitions, verdicts)."""

import pytest

from ebench.catalog import load_model
from ebench.engine import ENGINE_NAME, RunOptions, pure_run, run
from ebench.lowering import LoweredMachine
from ebench.limits import ExploreLimits

MODELS = ["m1", "m2r", "m3", "m3_bad_guard", "m3_bad_skip", "m8t"]


def _run_both(model, **kw):
    machine = load_model(model)
    opts = RunOptions(**kw)
    r_active = run(LoweredMachine(machine), opts)
    r_pure = pure_run(LoweredMachine(machine), opts)
    return r_active, r_pure


@pytest.mark.parametrize("model", MODELS)
def test_engine_parity_full(model):
    kw = dict(max_states=30_000)
    a, b = _run_both(model, **kw)
    assert a.states == b.states
    assert list(a.depth) == list(b.depth)
    assert list(a.pred_state) == list(b.pred_state)
    assert list(a.pred_event) == list(b.pred_event)
    assert list(a.t_src) == list(b.t_src)
    assert list(a.t_event) == list(b.t_event)
    assert list(a.t_binding) == list(b.t_binding)
    assert list(a.t_dst) == list(b.t_dst)
    assert a.n_transitions == b.n_transitions
    assert a.truncated == b.truncated
    assert a.invariant_violation == b.invariant_violation
    assert a.fis_violations == b.fis_violations
    assert a.deadlocks == b.deadlocks


def test_engine_parity_truncated():
    a, b = _run_both("m3", max_states=7)
    assert a.states == b.states and a.truncated and b.truncated


def test_engine_parity_stop_on_violation():
    a, b = _run_both("m3_bad_guard", stop_on_violation=True, record_transitions=False)
    assert a.invariant_violation == b.invariant_violation
    assert a.states == b.states


def test_engine_parity_m7_prefix():
    machine = load_model("m7")
    opts = RunOptions(max_states=3000, record_transitions=False)
    a = run(LoweredMachine(machine), opts)
    b = pure_run(LoweredMachine(machine), opts)
    assert a.states == b.states
    assert a.n_transitions == b.n_transitions


def test_engine_name_reported():
    assert ENGINE_NAME in ("compiled", "pure", "pure (forced)")


def test_engine_parity_max_depth():
    a, b = _run_both("m3", max_depth=3)
    assert a.states == b.states
    assert a.truncated == b.truncated == True  # noqa: E712
    assert a.truncation_reason == b.truncation_reason == "max_depth"
    assert a.deadlocks == b.deadlocks == []
