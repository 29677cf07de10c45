"""Dual-route evaluator checks: the main evaluator against the brute-force
reference, on every expression of the bundled models over random well-typed
environments, and on generated random expressions.

The acceptance suite re-runs the generated batch at full size (1000
expressions); here a smaller but still meaningful sample keeps the default
test run fast.  EBENCH_ORACLE_ENVS overrides the per-expression environment
count (spec'd at 1000 for the full run).
"""

from __future__ import annotations

import os
import random
from typing import Dict, Iterable, List, Tuple

import pytest

from ebench.catalog import load_model
from ebench.errors import EvalError
from ebench.evaluator import eval_expr, eval_pred
from ebench.limits import EvalLimits
from ebench.machine import (
    Assign,
    BeforeAfter,
    BinOp,
    ChooseIn,
    Compare,
    MachineDefinition,
    NameRef,
    free_names,
    primed_names,
)
from ebench.reference import ref_eval_expr, ref_eval_pred
from ebench.values import FinSet, Nat, Pair, Value

from genexpr import ExprGen

LIMITS = EvalLimits()
MODELS = ("m1", "m2r", "m3", "m7", "m8t", "m9l")


def random_value_of(env: Dict[str, Value], type_expr, rng: random.Random) -> Value:
    """Sample a member of a type expression without enumerating it."""
    if isinstance(type_expr, BinOp):
        if type_expr.op == "interval":
            lo = ref_eval_expr(env, type_expr.left, LIMITS).n
            hi = ref_eval_expr(env, type_expr.right, LIMITS).n
            return Nat(rng.randint(lo, hi))
        if type_expr.op in ("funspace", "pfunspace"):
            dom = list(_sampleable_set(env, type_expr.left, rng))
            if type_expr.op == "pfunspace":
                # keep sampled partial maps tiny: reachable ones are, and
                # huge random maps blow up comprehension obligations
                dom = rng.sample(dom, k=min(len(dom), rng.randrange(0, 4)))
            out = [Pair(d, random_value_of(env, type_expr.right, rng)) for d in dom]
            return FinSet(out)
        if type_expr.op == "prod":
            return Pair(
                random_value_of(env, type_expr.left, rng),
                random_value_of(env, type_expr.right, rng),
            )
    s = ref_eval_expr(env, type_expr, LIMITS)
    assert isinstance(s, FinSet) and len(s) > 0
    return rng.choice(s.elements)


def _sampleable_set(env, expr, rng) -> Iterable[Value]:
    v = ref_eval_expr(env, expr, LIMITS)
    assert isinstance(v, FinSet)
    return v.elements


def both_routes_pred(env, pred) -> None:
    try:
        main = eval_pred(env, pred, LIMITS)
    except EvalError as exc:
        main = type(exc).__name__
    try:
        ref = ref_eval_pred(env, pred, LIMITS)
    except EvalError as exc:
        ref = type(exc).__name__
    assert main == ref, f"pred disagreement: main={main!r} ref={ref!r}"


def both_routes_expr(env, expr) -> None:
    try:
        main = eval_expr(env, expr, LIMITS)
    except EvalError as exc:
        main = type(exc).__name__
    try:
        ref = ref_eval_expr(env, expr, LIMITS)
    except EvalError as exc:
        ref = type(exc).__name__
    assert main == ref, f"expr disagreement: main={main!r} ref={ref!r}"


def model_obligations(machine: MachineDefinition) -> List[Tuple[str, object, frozenset, frozenset]]:
    """(kind, node, free names, primed names) for every expression/predicate
    in a machine."""
    out = []

    def add(kind, node):
        out.append((kind, node, frozenset(free_names(node)), frozenset(primed_names(node))))

    for _, pred in machine.invariants:
        add("pred", pred)
    for v in machine.variables:
        # types are used as membership tests (typing invariants), and huge
        # interval types are only meaningful that way
        add("pred", Compare(":", NameRef(v.name), v.type_expr))
    for ev in [machine.init] + machine.events:
        for b in ev.params:
            add("expr", b.domain)
        for _, g in ev.guards:
            add("pred", g)
        for act in ev.actions:
            if isinstance(act, Assign):
                add("expr", act.expr)
            elif isinstance(act, ChooseIn):
                add("expr", act.set_expr)
            elif isinstance(act, BeforeAfter):
                add("pred", act.pred)
    return out


def _env_for(machine, needed, primed, rng):
    env = dict(machine.symbols)
    var_types = {v.name: v.type_expr for v in machine.variables}
    param_domains = {}
    for ev in machine.events:
        for b in ev.params:
            param_domains.setdefault(b.name, b.domain)
    for name in sorted(needed):
        if name in env:
            continue
        if name in var_types:
            env[name] = random_value_of(env, var_types[name], rng)
        elif name in param_domains:
            env[name] = random_value_of(env, param_domains[name], rng)
        else:
            raise AssertionError(f"unbound name {name} in obligations of {machine.name}")
    for name in sorted(primed):
        env[name + "'"] = random_value_of(env, var_types[name], rng)
    return env


@pytest.mark.parametrize("model", MODELS)
def test_bundled_model_expressions_agree(model):
    machine = load_model(model)
    rng = random.Random(f"oracle-{model}")
    n_envs = int(os.environ.get("EBENCH_ORACLE_ENVS", "40"))
    for kind, node, names, primed in model_obligations(machine):
        for _ in range(n_envs):
            env = _env_for(machine, names, primed, rng)
            if kind == "pred":
                both_routes_pred(env, node)
            else:
                both_routes_expr(env, node)


def test_generated_expressions_agree():
    n = int(os.environ.get("EBENCH_ORACLE_EXPRS", "300"))
    rng = random.Random("ebench-generated")
    for i in range(n):
        gen = ExprGen(random.Random(i * 7919 + 13))
        if i % 2 == 0:
            node = gen.pred(3)
            for j in range(3):
                both_routes_pred(gen.fresh_env(random.Random(i * 100003 + j)), node)
        else:
            from genexpr import random_sort

            node = gen.expr(random_sort(random.Random(i)), 3)
            for j in range(3):
                both_routes_expr(gen.fresh_env(random.Random(i * 100003 + j)), node)
