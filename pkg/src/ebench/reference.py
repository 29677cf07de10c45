"""Brute-force reference evaluator.

This is the independent second route for every set-theoretic operation: a
deliberately naive, enumerate-everything implementation kept free of the
optimizations (membership fast paths, memoization, interning) that the main
evaluator and the exploration engines use.  Tests cross-check the two routes
on every expression of the bundled models and on generated expressions.

The single concession to feasibility: membership in a (partial) function
space whose extension exceeds the enumeration cap is decided structurally
(domain/range checks) instead of by enumeration.
"""

from __future__ import annotations

import itertools
from typing import Dict, Iterable, List, Tuple

from .errors import (
    DomainTooLarge,
    EvalTypeError,
    NatBoundExceeded,
    NotAFunction,
    OutOfDomain,
    UnboundSymbol,
    UndefinedOperation,
)
from .limits import DEFAULT_EVAL_LIMITS, EvalLimits
from .machine import (
    AndP,
    Assign,
    BeforeAfter,
    BinOp,
    Binder,
    BoolLit,
    ChooseIn,
    Compare,
    EventDefinition,
    ImpP,
    MachineDefinition,
    NameRef,
    NatLit,
    NotP,
    OrP,
    PairExpr,
    PredT,
    PrimedRef,
    Quant,
    SetComp,
    SetLit,
    State,
    UnaryOp,
)
from .values import Atom, FinSet, Nat, Pair, Value

Env = Dict[str, Value]


def _as_set(v: Value, what: str) -> FinSet:
    if not isinstance(v, FinSet):
        raise EvalTypeError(f"{what} needs a set, got {v!r}")
    return v


def _as_nat(v: Value, what: str) -> int:
    if not isinstance(v, Nat):
        raise EvalTypeError(f"{what} needs a natural, got {v!r}")
    return v.n


def _pairs(v: FinSet, what: str) -> List[Pair]:
    out = []
    for e in v.elements:
        if not isinstance(e, Pair):
            raise EvalTypeError(f"{what} needs a relation, got element {e!r}")
        out.append(e)
    return out


def _check_cap(size: int, limits: EvalLimits, what: str) -> None:
    if size > limits.max_enum:
        raise DomainTooLarge(f"{what} would have {size} elements (cap {limits.max_enum})")


def _funspace_size(dom: int, rng: int, partial: bool, limits: EvalLimits) -> int:
    base = rng + 1 if partial else rng
    size = 1
    for _ in range(dom):
        size *= base
        if size > limits.max_enum:
            return size
    return size


def _enumerate_funspace(dom: FinSet, rng: FinSet, partial: bool, limits: EvalLimits) -> List[Value]:
    size = _funspace_size(len(dom), len(rng), partial, limits)
    _check_cap(size, limits, "function space")
    choices: List[List[Value | None]] = []
    for _ in dom.elements:
        opts: List[Value | None] = list(rng.elements)
        if partial:
            opts.append(None)
        choices.append(opts)
    out: List[Value] = []
    for combo in itertools.product(*choices):
        pairs = [
            Pair(d, r) for d, r in zip(dom.elements, combo) if r is not None
        ]
        out.append(FinSet(pairs))
    return out


def _is_total_function_on(v: Value, dom: FinSet, rng: FinSet, partial: bool) -> bool:
    if not isinstance(v, FinSet):
        return False
    seen = set()
    for e in v.elements:
        if not isinstance(e, Pair):
            return False
        if e.left._key in seen:
            return False
        seen.add(e.left._key)
        if e.left not in dom or e.right not in rng:
            return False
    if not partial and len(seen) != len(dom):
        return False
    return True


def ref_eval_expr(env: Env, e, limits: EvalLimits = DEFAULT_EVAL_LIMITS) -> Value:
    if isinstance(e, NameRef):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundSymbol(e.name) from None
    if isinstance(e, PrimedRef):
        try:
            return env[e.name + "'"]
        except KeyError:
            raise UnboundSymbol(e.name + "'") from None
    if isinstance(e, NatLit):
        return Nat(e.n)
    if isinstance(e, PairExpr):
        return Pair(ref_eval_expr(env, e.left, limits), ref_eval_expr(env, e.right, limits))
    if isinstance(e, SetLit):
        return FinSet(ref_eval_expr(env, x, limits) for x in e.elements)
    if isinstance(e, SetComp):
        return FinSet(_comp_values(env, e, limits))
    if isinstance(e, UnaryOp):
        return _ref_unary(env, e, limits)
    if isinstance(e, BinOp):
        return _ref_bin(env, e, limits)
    raise EvalTypeError(f"not an expression: {e!r}")


def _comp_values(env: Env, e: SetComp, limits: EvalLimits) -> List[Value]:
    out: List[Value] = []
    for inner in _binder_envs(env, e.binders, limits):
        keep = ref_eval_pred(inner, e.pred, limits)
        if keep:
            if e.result is not None:
                out.append(ref_eval_expr(inner, e.result, limits))
            else:
                vals = [inner[b.name] for b in e.binders]
                acc = vals[0]
                for v in vals[1:]:
                    acc = Pair(acc, v)
                out.append(acc)
    return out


def _binder_envs(env: Env, binders: List[Binder], limits: EvalLimits) -> Iterable[Env]:
    domains: List[List[Value]] = []
    total = 1
    for b in binders:
        # binder domains may mention earlier binders; re-evaluate per combo
        domains.append([])
        total = total  # placeholder; sizes checked per-domain below

    def rec(i: int, current: Env) -> Iterable[Env]:
        if i == len(binders):
            yield current
            return
        dom_v = ref_eval_expr(current, binders[i].domain, limits)
        dom = _as_set(dom_v, f"domain of {binders[i].name}")
        for v in dom.elements:
            nxt = dict(current)
            nxt[binders[i].name] = v
            yield from rec(i + 1, nxt)

    yield from rec(0, env)


def _ref_unary(env: Env, e: UnaryOp, limits: EvalLimits) -> Value:
    v = ref_eval_expr(env, e.arg, limits)
    if e.op == "ran":
        return FinSet(p.right for p in _pairs(_as_set(v, "ran"), "ran"))
    if e.op == "dom":
        return FinSet(p.left for p in _pairs(_as_set(v, "dom"), "dom"))
    if e.op == "min":
        s = _as_set(v, "min")
        if len(s) == 0:
            raise UndefinedOperation("min of empty set")
        return Nat(min(_as_nat(x, "min element") for x in s.elements))
    if e.op == "card":
        return Nat(len(_as_set(v, "card")))
    if e.op == "inv":
        return FinSet(Pair(p.right, p.left) for p in _pairs(_as_set(v, "inverse"), "inverse"))
    raise EvalTypeError(f"unknown unary op {e.op!r}")


def _ref_bin(env: Env, e: BinOp, limits: EvalLimits) -> Value:
    if e.op == "apply":
        f = ref_eval_expr(env, e.left, limits)
        x = ref_eval_expr(env, e.right, limits)
        fs = _as_set(f, "application")
        found = None
        seen = set()
        for p in _pairs(fs, "application"):
            if p.left._key in seen:
                raise NotAFunction(f"duplicate left component {p.left!r}")
            seen.add(p.left._key)
            if p.left == x:
                found = p.right
        if found is None:
            raise OutOfDomain(f"{x!r} not in domain")
        return found
    left = ref_eval_expr(env, e.left, limits)
    right = ref_eval_expr(env, e.right, limits)
    if e.op == "image":
        f = _as_set(left, "image")
        s = _as_set(right, "image argument")
        return FinSet(p.right for p in _pairs(f, "image") if p.left in s)
    if e.op == "union":
        return FinSet(list(_as_set(left, "union")) + list(_as_set(right, "union")))
    if e.op == "inter":
        rs = _as_set(right, "intersection")
        return FinSet(x for x in _as_set(left, "intersection") if x in rs)
    if e.op == "prod":
        a, b = _as_set(left, "product"), _as_set(right, "product")
        _check_cap(len(a) * len(b), limits, "product")
        return FinSet(Pair(x, y) for x in a for y in b)
    if e.op == "interval":
        lo, hi = _as_nat(left, "interval"), _as_nat(right, "interval")
        _check_cap(max(0, hi - lo + 1), limits, "interval")
        return FinSet(Nat(i) for i in range(lo, hi + 1))
    if e.op == "add":
        r = _as_nat(left, "+") + _as_nat(right, "+")
        if r > limits.nat_max:
            raise NatBoundExceeded(f"{r} exceeds the natural bound")
        return Nat(r)
    if e.op in ("funspace", "pfunspace"):
        dom = _as_set(left, "function space domain")
        rng = _as_set(right, "function space range")
        return FinSet(_enumerate_funspace(dom, rng, e.op == "pfunspace", limits))
    raise EvalTypeError(f"unknown binary op {e.op!r}")


def ref_eval_pred(env: Env, p, limits: EvalLimits = DEFAULT_EVAL_LIMITS) -> bool:
    if isinstance(p, BoolLit):
        return p.value
    if isinstance(p, Compare):
        return _ref_compare(env, p, limits)
    if isinstance(p, NotP):
        return not ref_eval_pred(env, p.arg, limits)
    if isinstance(p, AndP):
        # strict: both sides always evaluated
        a = ref_eval_pred(env, p.left, limits)
        b = ref_eval_pred(env, p.right, limits)
        return a and b
    if isinstance(p, OrP):
        a = ref_eval_pred(env, p.left, limits)
        b = ref_eval_pred(env, p.right, limits)
        return a or b
    if isinstance(p, ImpP):
        a = ref_eval_pred(env, p.left, limits)
        b = ref_eval_pred(env, p.right, limits)
        return (not a) or b
    if isinstance(p, Quant):
        results = [ref_eval_pred(inner, p.body, limits) for inner in _binder_envs(env, p.binders, limits)]
        return all(results) if p.kind == "all" else any(results)
    raise EvalTypeError(f"not a predicate: {p!r}")


def _ref_compare(env: Env, p: Compare, limits: EvalLimits) -> bool:
    left = ref_eval_expr(env, p.left, limits)
    if p.op in (":", "/:") and isinstance(p.right, BinOp) and p.right.op in ("funspace", "pfunspace"):
        dom = _as_set(ref_eval_expr(env, p.right.left, limits), "function space domain")
        rng = _as_set(ref_eval_expr(env, p.right.right, limits), "function space range")
        if _funspace_size(len(dom), len(rng), p.right.op == "pfunspace", limits) > limits.max_enum:
            inside = _is_total_function_on(left, dom, rng, p.right.op == "pfunspace")
            return inside if p.op == ":" else not inside
    right = ref_eval_expr(env, p.right, limits)
    if p.op == "=":
        return left == right
    if p.op == "/=":
        return left != right
    if p.op == ":":
        return left in _as_set(right, "membership")
    if p.op == "/:":
        return left not in _as_set(right, "membership")
    if p.op == "<:":
        rs = _as_set(right, "subset")
        return all(x in rs for x in _as_set(left, "subset"))
    if p.op == "<":
        return _as_nat(left, "<") < _as_nat(right, "<")
    if p.op == "<=":
        return _as_nat(left, "<=") <= _as_nat(right, "<=")
    if p.op == ">":
        return _as_nat(left, ">") > _as_nat(right, ">")
    if p.op == ">=":
        return _as_nat(left, ">=") >= _as_nat(right, ">=")
    raise EvalTypeError(f"unknown comparison {p.op!r}")


# ---------------------------------------------------------------------------
# naive event semantics (used by the test-side oracle explorer)


_GUARD_FALSE_ERRORS = (OutOfDomain, NotAFunction, UndefinedOperation, EvalTypeError, UnboundSymbol)


def ref_action_candidates(
    machine: MachineDefinition, env: Env, action, limits: EvalLimits
) -> List[Dict[str, Value]]:
    """All single-action outcomes as partial assignments."""
    if isinstance(action, Assign):
        return [{action.var: ref_eval_expr(env, action.expr, limits)}]
    if isinstance(action, ChooseIn):
        s = _as_set(ref_eval_expr(env, action.set_expr, limits), "choice set")
        return [{action.var: v} for v in s.elements]
    if isinstance(action, BeforeAfter):
        domains = []
        for var in action.vars:
            t = ref_eval_expr(env, machine.var_type(var), limits)
            domains.append(_as_set(t, f"type of {var}").elements)
        out = []
        for combo in itertools.product(*domains):
            inner = dict(env)
            for var, v in zip(action.vars, combo):
                inner[var + "'"] = v
            if ref_eval_pred(inner, action.pred, limits):
                out.append(dict(zip(action.vars, combo)))
        return out
    raise EvalTypeError(f"unknown action {action!r}")


def ref_after_states(
    machine: MachineDefinition,
    env: Env,
    pre: Dict[str, Value],
    actions,
    limits: EvalLimits = DEFAULT_EVAL_LIMITS,
) -> List[State]:
    """All post-states of an action block. `pre` holds the pre-values kept for
    unassigned variables (empty for the initialisation)."""
    names = machine.variable_names()
    candidate_sets = [ref_action_candidates(machine, env, a, limits) for a in actions]
    out = []
    for combo in itertools.product(*candidate_sets):
        bindings = dict(pre)
        for part in combo:
            bindings.update(part)
        out.append(State.from_bindings(names, bindings))
    uniq = {}
    for s in out:
        uniq[s.canonical_key()] = s
    return [uniq[k] for k in sorted(uniq)]


def ref_initial_states(
    machine: MachineDefinition, limits: EvalLimits = DEFAULT_EVAL_LIMITS
) -> List[State]:
    env = dict(machine.symbols)
    for label, pred in machine.init.guards:
        if not ref_eval_pred(env, pred, limits):
            return []
    return ref_after_states(machine, env, {}, machine.init.actions, limits)


def ref_param_bindings(
    machine: MachineDefinition, state: State, ev: EventDefinition, limits: EvalLimits
) -> List[Dict[str, Value]]:
    env = dict(machine.symbols)
    env.update(state.bindings)
    out: List[Dict[str, Value]] = [{}]
    for b in ev.params:
        dom = _as_set(ref_eval_expr(env, b.domain, limits), f"parameter {b.name}")
        out = [dict(bd, **{b.name: v}) for bd in out for v in dom.elements]
    return out


def ref_event_successors(
    machine: MachineDefinition,
    state: State,
    ev: EventDefinition,
    limits: EvalLimits = DEFAULT_EVAL_LIMITS,
) -> List[Tuple[Dict[str, Value], List[State]]]:
    """(binding, after-states) for each guard-true parameter binding.

    Guard evaluation errors other than resource limits count as a false
    guard, mirroring the checker's well-definedness rule.
    """
    results = []
    base = dict(machine.symbols)
    base.update(state.bindings)
    for binding in ref_param_bindings(machine, state, ev, limits):
        env = dict(base)
        env.update(binding)
        try:
            ok = all([ref_eval_pred(env, pred, limits) for _, pred in ev.guards])
        except _GUARD_FALSE_ERRORS:
            ok = False
        if not ok:
            continue
        succ = ref_after_states(machine, env, state.bindings, ev.actions, limits)
        results.append((binding, succ))
    return results
