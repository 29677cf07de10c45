"""Requirement property checks: the shipped catalog on the bundled models,
plus the structural properties (vacuity, trivial goals, anti-monotonicity)."""

import random

import pytest

from ebench.catalog import load_contexts, load_machine, load_model
from ebench.errors import TruncatedSystem
from ebench.explore import reachable, replay_trace
from ebench.limits import ExploreLimits
from ebench.parser import parse_machine, parse_pred_text
from ebench.props import (
    Absence,
    Inevitability,
    Monitor,
    builtin_requirements,
    check_absence,
    check_inevitability,
    check_monitor,
    find_monitor_counterexample,
    parse_requirements,
    run_requirement,
)

CTXS = load_contexts()
SMALL = ExploreLimits(max_states=100_000)
M7_BOUND = ExploreLimits(max_states=150_000)


@pytest.fixture(scope="module")
def m3_ts():
    return reachable(load_model("m3"))


@pytest.fixture(scope="module")
def reqs():
    return builtin_requirements()


def test_catalog_shape(reqs):
    assert len(reqs) == 9
    assert set(reqs) == {"R11bis", "R12bis", "R21", "R22", "R31", "R32", "R41", "R42", "R51"}
    assert "R61" not in reqs  # quantitative-time requirements are out of scope
    assert reqs["R21"].model == "m3" and isinstance(reqs["R21"].prop, Absence)
    assert reqs["R41"].overlays == ("safe_oracle",) and reqs["R41"].adversarial


def test_r21_r22_absence_pass(m3_ts, reqs):
    assert check_absence(m3_ts, reqs["R21"].prop).verdict == "pass"
    assert check_absence(m3_ts, reqs["R22"].prop).verdict == "pass"


def test_r31_r32_pass(m3_ts, reqs):
    assert check_absence(m3_ts, reqs["R31"].prop).verdict == "pass"
    assert check_absence(m3_ts, reqs["R32"].prop).verdict == "pass"


def test_absence_unconditional_retraction_fails(m3_ts):
    """Dropping the source restriction exhibits the retraction sequence."""
    report = check_absence(m3_ts, Absence(("retracting_gears",), parse_pred_text("true")))
    assert report.verdict == "fail"
    trace = report.violations[0].trace
    assert [s.event for s in trace.steps] == [
        "PU1",
        "unlocking_UP",
        "opening_doors_UP",
        "retracting_gears",
    ]
    assert replay_trace(load_model("m3"), trace)


def test_absence_vacuity(m3_ts):
    report = check_absence(m3_ts, Absence(("retracting_gears", "PU1"), parse_pred_text("false")))
    assert report.verdict == "pass"


def test_absence_requires_complete_system():
    ts = reachable(load_model("m3"), ExploreLimits(max_states=5))
    with pytest.raises(TruncatedSystem):
        check_absence(ts, Absence(("PU1",), parse_pred_text("true")))


def test_inevitability_r11bis_r12bis(reqs):
    m3 = load_model("m3")
    assert check_inevitability(m3, reqs["R11bis"].prop, SMALL).verdict == "pass"
    assert check_inevitability(m3, reqs["R12bis"].prop, SMALL).verdict == "pass"


def test_inevitability_goal_true_trivially_passes():
    m3 = load_model("m3")
    prop = Inevitability(("PU1",), parse_pred_text("true"), parse_pred_text("true"))
    assert check_inevitability(m3, prop, SMALL).verdict == "pass"


def test_inevitability_lasso():
    src = (
        "machine loopy sees c0\nvariables\n  x : BOOL\n"
        "init\n  then\n    act1: x := TRUE\n  end\n"
        "event spin\n  then\n    act1: x := TRUE\n  end\n"
        "event reach\n  when\n    grd1: x = TRUE\n  then\n    act1: x := FALSE\n  end\n"
        "end\n"
    )
    m = parse_machine(src, CTXS)
    prop = Inevitability((), parse_pred_text("x = TRUE"), parse_pred_text("x = FALSE"))
    report = check_inevitability(m, prop, SMALL)
    assert report.verdict == "fail"
    assert report.violations[0].kind == "inevitability-lasso"
    assert replay_trace(m, report.violations[0].trace)


def test_inevitability_bad_terminal():
    src = (
        "machine sink sees c0\nvariables\n  x : PHASES\n"
        "init\n  then\n    act1: x := haltdown\n  end\n"
        "event go\n  when\n    grd1: x = haltdown\n  then\n    act1: x := movingup\n  end\n"
        "event stopit\n  when\n    grd1: x = movingup\n  then\n    act1: x := haltup\n  end\n"
        "end\n"
    )
    m = parse_machine(src, CTXS)
    # from init, every maximal path ends in haltup (no outgoing events); goal movingdown unreachable
    prop = Inevitability((), parse_pred_text("x = haltdown"), parse_pred_text("x = movingdown"))
    report = check_inevitability(m, prop, SMALL)
    assert report.verdict == "fail"
    assert report.violations[0].kind == "inevitability-terminal"
    assert replay_trace(m, report.violations[0].trace)


def test_monitor_pass_and_antimonotonicity(m3_ts):
    mon = Monitor(parse_pred_text("not (phase = movingup /\\ button = DOWN)"))
    assert check_monitor(m3_ts, mon).verdict == "pass"
    # anti-monotonicity: a pass is preserved on arbitrary sub-systems; we
    # emulate random subsystems by re-checking prefixes of the state list
    rng = random.Random(7)
    low = m3_ts.low
    pred = low.lower_pred("submon", mon.pred)
    for _ in range(20):
        subset = rng.sample(range(m3_ts.n_states), k=rng.randrange(1, m3_ts.n_states))
        assert all(pred.check(m3_ts.result.states[i]) is True for i in subset)


def test_r41_r42_r51_bounded_pass(reqs):
    for name in ("R41", "R42", "R51"):
        report = run_requirement(reqs[name], M7_BOUND, allow_truncated=True)
        assert report.verdict == "pass", name
        assert report.stats.truncated  # sensor level exceeds the bound


def test_r41_r42_r51_adversarial_counterexamples(reqs):
    m7 = load_model("m7")
    for name in ("R41", "R42", "R51"):
        report = run_requirement(reqs[name], SMALL, adversarial=True)
        assert report.verdict == "pass", name
        trace = report.violations[0].trace
        assert replay_trace(m7, trace)


def test_unconstrained_monitor_fails_via_computing_module(reqs):
    m7 = load_model("m7")
    trace = find_monitor_counterexample(m7, reqs["R41"].prop, SMALL)
    assert trace is not None
    assert trace.steps[-1].event == "Computing_Module_1_2"


def test_extra_catalog_parses():
    from ebench.catalog import _read_source

    extra = parse_requirements(_read_source("extra_requirements.cat"), "extra_requirements.cat")
    assert set(extra) == {"R11bis_m7", "R12bis_m7"}
    # the m7 variants exceed desk-scale exhaustive exploration by design
    with pytest.raises(TruncatedSystem):
        run_requirement(extra["R11bis_m7"], ExploreLimits(max_states=20_000))
