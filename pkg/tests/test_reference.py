"""Reference-evaluator checks against hand-verified examples."""

import pytest

from ebench.errors import DomainTooLarge, UndefinedOperation
from ebench.limits import EvalLimits
from ebench.machine import (
    AndP,
    PrimedRef,
    BeforeAfter,
    BinOp,
    Binder,
    Compare,
    ImpP,
    NameRef,
    NatLit,
    OrP,
    PairExpr,
    Quant,
    SetComp,
    SetLit,
    UnaryOp,
)
from ebench.reference import ref_eval_expr, ref_eval_pred
from ebench.values import Atom, FinSet, Nat, Pair

DOORS = FinSet([Atom("door_front"), Atom("door_left"), Atom("door_right")])
SDOORS = FinSet([Atom("OPEN"), Atom("CLOSED")])
ENV = {
    "DOORS": DOORS,
    "SDOORS": SDOORS,
    "OPEN": Atom("OPEN"),
    "CLOSED": Atom("CLOSED"),
    "UP": Atom("UP"),
    "DOWN": Atom("DOWN"),
    "movingup": Atom("movingup"),
    "EXTENDED": Atom("EXTENDED"),
}


def all_doors(v):
    return FinSet([Pair(a, Atom(v)) for a in DOORS])


def test_constant_map_comprehension():
    # { a : DOORS, b : SDOORS | b = CLOSED . a |-> b }
    comp = SetComp(
        binders=[Binder("a", NameRef("DOORS")), Binder("b", NameRef("SDOORS"))],
        pred=Compare("=", NameRef("b"), NameRef("CLOSED")),
        result=PairExpr(NameRef("a"), NameRef("b")),
    )
    assert ref_eval_expr(ENV, comp) == all_doors("CLOSED")


def test_ran_constant_map():
    env = dict(ENV, gstate=FinSet([Pair(Atom(f"gear_{g}"), Atom("EXTENDED")) for g in "flr"]))
    assert ref_eval_expr(env, UnaryOp("ran", NameRef("gstate"))) == FinSet([Atom("EXTENDED")])


def test_min_of_ran():
    # min(ran({1|->160, 2|->40000})) = 160, by enumerating the two-element set
    at = SetLit([PairExpr(NatLit(1), NatLit(160)), PairExpr(NatLit(2), NatLit(40000))])
    assert ref_eval_expr({}, UnaryOp("min", UnaryOp("ran", at))) == Nat(160)


def test_min_empty_is_undefined():
    with pytest.raises(UndefinedOperation):
        ref_eval_expr({}, UnaryOp("min", SetLit([])))


def test_m1_inv3_truth_table():
    # phase=movingup => button=UP
    inv3 = ImpP(
        Compare("=", NameRef("phase"), NameRef("movingup")),
        Compare("=", NameRef("button"), NameRef("UP")),
    )
    assert ref_eval_pred(dict(ENV, button=Atom("UP"), phase=Atom("movingup")), inv3)
    assert not ref_eval_pred(dict(ENV, button=Atom("DOWN"), phase=Atom("movingup")), inv3)


def test_forall_constant_map():
    env = dict(ENV, dstate=all_doors("CLOSED"))
    pred = Quant(
        "all",
        [Binder("door", NameRef("DOORS"))],
        Compare("=", BinOp("apply", NameRef("dstate"), NameRef("door")), NameRef("CLOSED")),
    )
    assert ref_eval_pred(env, pred)


def test_funspace_counts():
    space = ref_eval_expr(ENV, BinOp("funspace", NameRef("DOORS"), NameRef("SDOORS")))
    assert len(space) == 8  # 2^3 by brute enumeration
    one = ref_eval_expr(
        ENV, BinOp("funspace", BinOp("interval", NatLit(1), NatLit(3)), SetLit([NameRef("DOWN")]))
    )
    assert len(one) == 1
    nested = ref_eval_expr(
        ENV,
        BinOp(
            "funspace",
            BinOp("interval", NatLit(1), NatLit(3)),
            BinOp("funspace", NameRef("DOORS"), SetLit([NameRef("UP")])),
        ),
    )
    assert len(nested) == 1


def test_funspace_cap():
    big = BinOp(
        "funspace",
        BinOp("interval", NatLit(1), NatLit(40)),
        BinOp("interval", NatLit(1), NatLit(40)),
    )
    with pytest.raises(DomainTooLarge):
        ref_eval_expr({}, big, EvalLimits(max_enum=1000))


def test_update_hout_disjunction_two_branches():
    # general_EV = TRUE, A_Switch_Out = FALSE: first and fourth disjunct allow Hin and 0
    env = {
        "general_EV": Atom("TRUE"),
        "A_Switch_Out": Atom("FALSE"),
        "TRUE": Atom("TRUE"),
        "FALSE": Atom("FALSE"),
        "Hin": Nat(1),
    }
    disj = OrP(
        OrP(
            AndP(
                Compare("=", NameRef("general_EV"), NameRef("TRUE")),
                Compare("=", PrimedRef("general_EV_Hout"), NameRef("Hin")),
            ),
            AndP(
                Compare("=", NameRef("general_EV"), NameRef("FALSE")),
                Compare("=", PrimedRef("general_EV_Hout"), NatLit(0)),
            ),
        ),
        OrP(
            AndP(
                Compare("=", NameRef("A_Switch_Out"), NameRef("TRUE")),
                Compare("=", PrimedRef("general_EV_Hout"), NameRef("Hin")),
            ),
            AndP(
                Compare("=", NameRef("A_Switch_Out"), NameRef("FALSE")),
                Compare("=", PrimedRef("general_EV_Hout"), NatLit(0)),
            ),
        ),
    )
    allowed = [
        v
        for v in (Nat(0), Nat(1))
        if ref_eval_pred(dict(env, **{"general_EV_Hout'": v}), disj)
    ]
    assert allowed == [Nat(0), Nat(1)]
