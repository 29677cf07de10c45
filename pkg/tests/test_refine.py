"""Refinement checking: the documented chain, mutants, reflexivity, trace
inclusion, and a small data-refinement pair with a custom gluing."""

import random

import pytest

from ebench.catalog import load_contexts, load_event_map, load_model
from ebench.errors import EbenchError
from ebench.explore import reachable, replay_trace
from ebench.limits import ExploreLimits
from ebench.parser import parse_machine, parse_pred_text
from ebench.refine import (
    RefinementSpec,
    check_convergence,
    check_refinement,
    check_relative_deadlock,
    derive_event_map,
)

CTXS = load_contexts()


@pytest.fixture(scope="module")
def chain():
    return {name: load_model(name) for name in ("m1", "m2r", "m3", "m3_bad_skip")}


@pytest.mark.parametrize("name", ["m1", "m2r", "m3"])
def test_reflexivity(chain, name):
    machine = chain.get(name) or load_model(name)
    spec = RefinementSpec(machine, machine, event_map={e: e for e in machine.event_names()})
    assert check_refinement(spec).verdict == "pass"
    assert check_relative_deadlock(spec).verdict == "pass"


def test_m1_m2r(chain):
    spec = RefinementSpec(chain["m1"], chain["m2r"], event_map=load_event_map("m1", "m2r"))
    assert check_refinement(spec).verdict == "pass"
    assert check_relative_deadlock(spec).verdict == "pass"


def test_m2r_m3_full_suite(chain):
    spec = RefinementSpec(chain["m2r"], chain["m3"])
    # gear events derive to skip from their `new` markers
    assert spec.event_map["retracting_gears"] is None
    assert spec.event_map["PU1"] == "PU1"
    assert check_refinement(spec).verdict == "pass"
    assert check_relative_deadlock(spec).verdict == "pass"
    assert check_convergence(spec).verdict == "pass"


def test_skip_mutant_fails(chain):
    spec = RefinementSpec(chain["m2r"], chain["m3_bad_skip"])
    report = check_refinement(spec)
    assert report.verdict == "fail"
    v = report.violations[0]
    assert v.kind == "skip" and v.label == "retraction"
    assert v.trace is not None and v.trace.steps[-1].event == "retraction"
    assert replay_trace(chain["m3_bad_skip"], v.trace)


def test_guard_strengthening_not_assumed(chain):
    """An event whose marker lies (claims to refine an abstract event it
    cannot simulate) must fail: witnesses are searched, not trusted."""
    src = (
        "machine liar sees c0\nvariables\n  button : POSITIONS\n  phase : PHASES\n"
        "init\n  then\n    act1: button := DOWN\n    act2: phase := haltdown\n  end\n"
        "event PressUP extends PressDOWN\n  when\n    grd1: button = DOWN\n  then\n"
        "    act1: phase := movingup\n    act2: button := UP\n  end\n"
        "end\n"
    )
    liar = parse_machine(src, CTXS)
    spec = RefinementSpec(load_model("m1"), liar)
    report = check_refinement(spec)
    assert report.verdict == "fail"
    assert report.violations[0].kind == "refinement"


def test_m3_m7_bounded(chain):
    m7 = load_model("m7")
    spec = RefinementSpec(chain["m3"], m7, event_map=load_event_map("m3", "m7"))
    report = check_refinement(spec, ExploreLimits(max_states=60_000))
    assert report.verdict == "pass"
    assert report.stats.truncated  # the sensor level exceeds any desk cap


def test_m3_m8t_refinement():
    m3 = load_model("m3")
    m8t = load_model("m8t")
    spec = RefinementSpec(m3, m8t)
    assert check_refinement(spec).verdict == "pass"
    assert check_relative_deadlock(spec).verdict == "pass"


def test_relative_deadlock_forced_failure():
    """Strengthening all concrete guards to false deadlocks immediately."""
    src = (
        "machine frozen sees c0\nvariables\n  button : POSITIONS\n  phase : PHASES\n"
        "init\n  then\n    act1: button := DOWN\n    act2: phase := haltdown\n  end\n"
        "event PressUP extends PressUP\n  when\n    grd1: button = DOWN\n    grd2: false\n  then\n"
        "    act1: phase := movingup\n    act2: button := UP\n  end\n"
        "end\n"
    )
    frozen = parse_machine(src, CTXS)
    spec = RefinementSpec(load_model("m1"), frozen)
    assert check_refinement(spec).verdict == "pass"  # no transitions, nothing to simulate
    report = check_relative_deadlock(spec)
    assert report.verdict == "fail"
    assert report.violations[0].kind == "relative-deadlock"


def test_no_glued_abstract_init():
    src = (
        "machine off sees c0\nvariables\n  button : POSITIONS\n  phase : PHASES\n"
        "init\n  then\n    act1: button := UP\n    act2: phase := haltup\n  end\n"
        "event PressDOWN extends PressDOWN\n  when\n    grd1: button = UP\n  then\n"
        "    act1: phase := movingdown\n    act2: button := DOWN\n  end\n"
        "end\n"
    )
    off = parse_machine(src, CTXS)
    spec = RefinementSpec(load_model("m1"), off)
    report = check_refinement(spec)
    assert report.verdict == "fail"
    assert report.violations[0].kind == "NoGluedAbstractInit"


def test_custom_gluing_data_refinement():
    """Renamed variable related by an explicit gluing predicate."""
    src = (
        "machine renamed sees c0\nvariables\n  knob : POSITIONS\n  stage : PHASES\n"
        "init\n  then\n    act1: knob := DOWN\n    act2: stage := haltdown\n  end\n"
        "event PressDOWN\n  when\n    grd1: knob = UP\n  then\n    act1: stage := movingdown\n    act2: knob := DOWN\n  end\n"
        "event PressUP\n  when\n    grd1: knob = DOWN\n  then\n    act1: stage := movingup\n    act2: knob := UP\n  end\n"
        "event movingup\n  when\n    grd1: stage = movingup\n  then\n    act1: stage := haltup\n  end\n"
        "event movingdown\n  when\n    grd1: stage = movingdown\n  then\n    act1: stage := haltdown\n  end\n"
        "end\n"
    )
    renamed = parse_machine(src, CTXS)
    gluing = parse_pred_text("button = knob /\\ phase = stage")
    spec = RefinementSpec(
        load_model("m1"),
        renamed,
        gluing=gluing,
        event_map={e: e for e in renamed.event_names()},
    )
    assert check_refinement(spec).verdict == "pass"
    assert check_relative_deadlock(spec).verdict == "pass"


def test_m3_m7_convergence_fails():
    """m7's computing loop and handle flips are genuine skip-cycles; the
    convergence check reports a lasso (see the docs on why this is separate
    from the refinement verdict)."""
    m3 = load_model("m3")
    m7 = load_model("m7")
    spec = RefinementSpec(m3, m7, event_map=load_event_map("m3", "m7"))
    report = check_convergence(spec, ExploreLimits(max_states=5_000))
    assert report.verdict == "fail"
    assert report.violations[0].kind == "convergence"


def test_event_map_totality_enforced():
    m3 = load_model("m3")
    with pytest.raises(EbenchError):
        RefinementSpec(load_model("m2r"), m3, event_map={"PU1": "PU1"})


def test_trace_inclusion_spot_check(chain):
    """Random concrete m3 traces project (with skip-stuttering) to abstract
    m2r traces; 100 samples per the module property."""
    m2r, m3 = chain["m2r"], chain["m3"]
    spec = RefinementSpec(m2r, m3)
    ts3 = reachable(m3)
    adjacency = {}
    for src, name, bindings, dst in ts3.transitions():
        adjacency.setdefault(src, []).append((name, dst))
    a_ts = reachable(m2r)
    a_adj = {}
    for src, name, bindings, dst in a_ts.transitions():
        a_adj.setdefault((src, name), set()).add(dst)
    a_index = {a_ts.state(i).canonical_key(): i for i in range(a_ts.n_states)}

    def project(state):
        return a_index[
            __import__("ebench.machine", fromlist=["State"]).State(
                tuple(m2r.variable_names()),
                tuple(state.get(n) for n in m2r.variable_names()),
            ).canonical_key()
        ]

    rng = random.Random(20240811)
    for _ in range(100):
        cur = 0
        abstract = project(ts3.state(0))
        for _step in range(rng.randrange(1, 25)):
            outs = adjacency.get(cur)
            if not outs:
                break
            name, nxt = rng.choice(outs)
            target = spec.event_map[name]
            proj_next = project(ts3.state(nxt))
            if target is None:
                assert proj_next == abstract  # skip-stuttering
            else:
                assert proj_next in a_adj.get((abstract, target), set())
                abstract = proj_next
            cur = nxt


def test_pair_sets_track_multiple_abstract_candidates():
    """With a permissive gluing the checker must carry several abstract
    candidates and only fail when none of them has a witness."""
    abstract = parse_machine(
        "machine absnd sees c0\nvariables\n  x : BOOL\n"
        "init\n  then\n    act1: x :: BOOL\n  end\n"
        "event consume\n  when\n    grd1: x = TRUE\n  then\n    act1: x := FALSE\n  end\n"
        "event idle\n  when\n    grd1: x = FALSE\n  then\n    act1: x := FALSE\n  end\n"
        "end\n",
        CTXS,
    )
    concrete = parse_machine(
        "machine steps sees c0\nvariables\n  n : 0..3\n"
        "init\n  then\n    act1: n := 0\n  end\n"
        "event one\n  when\n    grd1: n = 0\n  then\n    act1: n := 1\n  end\n"
        "event two\n  when\n    grd1: n = 1\n  then\n    act1: n := 2\n  end\n"
        "event spin\n  when\n    grd1: n = 2\n  then\n    act1: n := 2\n  end\n"
        "end\n",
        CTXS,
    )
    # gluing `true`: both abstract initials glue to the concrete initial.
    # `one` consumes x=TRUE (a witness exists from one candidate only);
    # `two` then has no x=TRUE candidate left and must fail.
    spec = RefinementSpec(
        abstract,
        concrete,
        gluing=parse_pred_text("true"),
        event_map={"one": "consume", "two": "consume", "spin": "idle"},
    )
    report = check_refinement(spec)
    assert report.verdict == "fail"
    v = report.violations[0]
    assert v.kind == "refinement" and v.label == "two"
    assert "x=FALSE" in v.message

    # mapping `two` onto the always-available idle event makes it pass
    spec_ok = RefinementSpec(
        abstract,
        concrete,
        gluing=parse_pred_text("true"),
        event_map={"one": "consume", "two": "idle", "spin": "idle"},
    )
    assert check_refinement(spec_ok).verdict == "pass"
