"""Main evaluator: expressions, predicates, type enumeration, after-states.

Semantics are strict and two-valued over finite domains; the only deviation
from plain enumeration is a set of membership fast paths (function spaces,
intervals, products) that decide `x : S` structurally without building S.
The brute-force twin in reference.py re-derives every operation
independently; the two are cross-checked by the oracle-equivalence tests.

Guard lists evaluate in declaration order and stop at the first false guard;
well-definedness errors inside a guard make the guard false (recorded as a
warning by callers), while the same errors inside invariants are violations.
"""

from __future__ import annotations

import itertools
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

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
    PrimedRef,
    Quant,
    SetComp,
    SetLit,
    State,
    UnaryOp,
)
from .values import FinSet, Nat, Pair, Value, apply_function

Env = Dict[str, Value]

#: errors that make a guard false instead of aborting evaluation
GUARD_FALSE_ERRORS = (OutOfDomain, NotAFunction, UndefinedOperation, EvalTypeError, UnboundSymbol)


def _need_set(v: Value, what: str) -> FinSet:
    if not isinstance(v, FinSet):
        raise EvalTypeError(f"{what} needs a set, got {v!r}")
    return v


def _need_nat(v: Value, what: str) -> int:
    if not isinstance(v, Nat):
        raise EvalTypeError(f"{what} needs a natural, got {v!r}")
    return v.n


def eval_expr(env: Env, e, limits: EvalLimits = DEFAULT_EVAL_LIMITS) -> Value:
    kind = type(e)
    if kind is NameRef:
        v = env.get(e.name)
        if v is None:
            raise UnboundSymbol(e.name)
        return v
    if kind is NatLit:
        return Nat(e.n)
    if kind is PrimedRef:
        v = env.get(e.name + "'")
        if v is None:
            raise UnboundSymbol(e.name + "'")
        return v
    if kind is PairExpr:
        return Pair(eval_expr(env, e.left, limits), eval_expr(env, e.right, limits))
    if kind is SetLit:
        return FinSet(eval_expr(env, x, limits) for x in e.elements)
    if kind is SetComp:
        out: List[Value] = []
        for inner in _binder_product(env, e.binders, limits):
            if eval_pred(inner, e.pred, limits):
                if e.result is not None:
                    out.append(eval_expr(inner, e.result, limits))
                else:
                    acc = inner[e.binders[0].name]
                    for b in e.binders[1:]:
                        acc = Pair(acc, inner[b.name])
                    out.append(acc)
        return FinSet(out)
    if kind is UnaryOp:
        if e.op == "ran":
            s = _need_set(eval_expr(env, e.arg, limits), "ran")
            return FinSet(_pair_of(x, "ran").right for x in s.elements)
        if e.op == "dom":
            s = _need_set(eval_expr(env, e.arg, limits), "dom")
            return FinSet(_pair_of(x, "dom").left for x in s.elements)
        if e.op == "min":
            s = _need_set(eval_expr(env, e.arg, limits), "min")
            if not s.elements:
                raise UndefinedOperation("min of empty set")
            return Nat(min(_need_nat(x, "min element") for x in s.elements))
        if e.op == "card":
            return Nat(len(_need_set(eval_expr(env, e.arg, limits), "card")))
        if e.op == "inv":
            s = _need_set(eval_expr(env, e.arg, limits), "inverse")
            return FinSet(Pair(_pair_of(x, "inverse").right, x.left) for x in s.elements)
        raise EvalTypeError(f"unknown unary op {e.op!r}")
    if kind is BinOp:
        return _eval_bin(env, e, limits)
    raise EvalTypeError(f"not an expression: {e!r}")


def _pair_of(v: Value, what: str) -> Pair:
    if not isinstance(v, Pair):
        raise EvalTypeError(f"{what} needs a relation, got element {v!r}")
    return v


def _eval_bin(env: Env, e: BinOp, limits: EvalLimits) -> Value:
    op = e.op
    if op == "apply":
        return apply_function(eval_expr(env, e.left, limits), eval_expr(env, e.right, limits))
    left = eval_expr(env, e.left, limits)
    if op == "image":
        f = _need_set(left, "image")
        s = _need_set(eval_expr(env, e.right, limits), "image argument")
        return FinSet(p.right for p in map(lambda x: _pair_of(x, "image"), f.elements) if p.left in s)
    right = eval_expr(env, e.right, limits)
    if op == "union":
        return FinSet(
            itertools.chain(_need_set(left, "union").elements, _need_set(right, "union").elements)
        )
    if op == "inter":
        rs = _need_set(right, "intersection")
        return FinSet(x for x in _need_set(left, "intersection").elements if x in rs)
    if op == "prod":
        a, b = _need_set(left, "product"), _need_set(right, "product")
        if len(a) * len(b) > limits.max_enum:
            raise DomainTooLarge(f"product of {len(a)}x{len(b)} exceeds cap")
        return FinSet(Pair(x, y) for x in a.elements for y in b.elements)
    if op == "interval":
        lo, hi = _need_nat(left, "interval"), _need_nat(right, "interval")
        if hi - lo + 1 > limits.max_enum:
            raise DomainTooLarge(f"interval {lo}..{hi} exceeds cap")
        return FinSet(Nat(i) for i in range(lo, hi + 1))
    if op == "add":
        total = _need_nat(left, "+") + _need_nat(right, "+")
        if total > limits.nat_max:
            raise NatBoundExceeded(f"{total} exceeds the natural bound")
        return Nat(total)
    if op in ("funspace", "pfunspace"):
        dom = _need_set(left, "function space domain")
        rng = _need_set(right, "function space range")
        return FinSet(_iter_funspace(dom, rng, op == "pfunspace", limits))
    raise EvalTypeError(f"unknown binary op {op!r}")


def _funspace_size(dom: int, rng: int, partial: bool, limits: EvalLimits) -> int:
    base = rng + 1 if partial else rng
    size = 1
    for _ in range(dom):
        size *= base
        if size > limits.max_enum:
            return size
    return size


def _iter_funspace(dom: FinSet, rng: FinSet, partial: bool, limits: EvalLimits) -> Iterator[Value]:
    if _funspace_size(len(dom), len(rng), partial, limits) > limits.max_enum:
        raise DomainTooLarge(
            f"function space over {len(dom)} -> {len(rng)} elements exceeds cap {limits.max_enum}"
        )
    opts: List[List[Optional[Value]]] = []
    for _ in dom.elements:
        col: List[Optional[Value]] = list(rng.elements)
        if partial:
            col.append(None)
        opts.append(col)
    for combo in itertools.product(*opts):
        yield FinSet(Pair(d, r) for d, r in zip(dom.elements, combo) if r is not None)


def _binder_product(env: Env, binders: List[Binder], limits: EvalLimits) -> Iterator[Env]:
    if not binders:
        yield env
        return
    head, *rest = binders
    dom = _need_set(eval_expr(env, head.domain, limits), f"domain of {head.name}")
    for v in dom.elements:
        inner = dict(env)
        inner[head.name] = v
        if rest:
            yield from _binder_product(inner, rest, limits)
        else:
            yield inner


def eval_pred(env: Env, p, limits: EvalLimits = DEFAULT_EVAL_LIMITS) -> bool:
    kind = type(p)
    if kind is Compare:
        return _eval_compare(env, p, limits)
    if kind is AndP:
        a = eval_pred(env, p.left, limits)
        b = eval_pred(env, p.right, limits)
        return a and b
    if kind is OrP:
        a = eval_pred(env, p.left, limits)
        b = eval_pred(env, p.right, limits)
        return a or b
    if kind is ImpP:
        a = eval_pred(env, p.left, limits)
        b = eval_pred(env, p.right, limits)
        return (not a) or b
    if kind is NotP:
        return not eval_pred(env, p.arg, limits)
    if kind is BoolLit:
        return p.value
    if kind is Quant:
        hold = True
        witness = False
        for inner in _binder_product(env, p.binders, limits):
            r = eval_pred(inner, p.body, limits)
            hold = hold and r
            witness = witness or r
        return hold if p.kind == "all" else witness
    raise EvalTypeError(f"not a predicate: {p!r}")


def _member_fast(env: Env, value: Value, type_expr, limits: EvalLimits) -> Optional[bool]:
    """Structural membership for set constructs whose extension may be huge;
    recursive, so e.g. the range of a partial-function type that is a large
    interval is bounds-checked and never enumerated."""
    if isinstance(type_expr, BinOp):
        if type_expr.op in ("funspace", "pfunspace"):
            if not isinstance(value, FinSet):
                return False
            seen = set()
            domain_size = None
            for el in value.elements:
                if not isinstance(el, Pair):
                    return False
                if el.left._key in seen:
                    return False
                seen.add(el.left._key)
                if not _member(env, el.left, type_expr.left, limits):
                    return False
                if not _member(env, el.right, type_expr.right, limits):
                    return False
            if type_expr.op == "funspace":
                dom = _need_set(eval_expr(env, type_expr.left, limits), "function space domain")
                if len(seen) != len(dom):
                    return False
            return True
        if type_expr.op == "interval":
            lo = _need_nat(eval_expr(env, type_expr.left, limits), "interval")
            hi = _need_nat(eval_expr(env, type_expr.right, limits), "interval")
            return isinstance(value, Nat) and lo <= value.n <= hi
        if type_expr.op == "prod":
            if not isinstance(value, Pair):
                return False
            return _member(env, value.left, type_expr.left, limits) and _member(
                env, value.right, type_expr.right, limits
            )
    return None


def _member(env: Env, value: Value, set_expr, limits: EvalLimits) -> bool:
    fast = _member_fast(env, value, set_expr, limits)
    if fast is None:
        fast = value in _need_set(eval_expr(env, set_expr, limits), "membership")
    return bool(fast)


def _eval_compare(env: Env, p: Compare, limits: EvalLimits) -> bool:
    op = p.op
    left = eval_expr(env, p.left, limits)
    if op in (":", "/:"):
        fast = _member(env, left, p.right, limits)
        return fast if op == ":" else not fast
    right = eval_expr(env, p.right, limits)
    if op == "=":
        return left == right
    if op == "/=":
        return left != right
    if op == "<:":
        rs = _need_set(right, "subset")
        return all(x in rs for x in _need_set(left, "subset").elements)
    if op == "<":
        return _need_nat(left, "<") < _need_nat(right, "<")
    if op == "<=":
        return _need_nat(left, "<=") <= _need_nat(right, "<=")
    if op == ">":
        return _need_nat(left, ">") > _need_nat(right, ">")
    if op == ">=":
        return _need_nat(left, ">=") >= _need_nat(right, ">=")
    raise EvalTypeError(f"unknown comparison {op!r}")


def enumerate_type(env: Env, type_expr, limits: EvalLimits = DEFAULT_EVAL_LIMITS) -> FinSet:
    """Full extension of a type expression (DomainTooLarge beyond the cap)."""
    return _need_set(eval_expr(env, type_expr, limits), "type expression")


# ---------------------------------------------------------------------------
# event semantics


def machine_env(machine: MachineDefinition) -> Env:
    return dict(machine.symbols)


def state_env(machine: MachineDefinition, state: State) -> Env:
    env = dict(machine.symbols)
    env.update(zip(state.names, state.values))
    return env


def _action_updates(
    machine: MachineDefinition, env: Env, action, limits: EvalLimits
) -> List[Tuple[Tuple[str, Value], ...]]:
    """Per-action candidate updates, as tuples of (var, value)."""
    if isinstance(action, Assign):
        return [((action.var, eval_expr(env, action.expr, limits)),)]
    if isinstance(action, ChooseIn):
        chosen = _need_set(eval_expr(env, action.set_expr, limits), "choice set")
        return [((action.var, v),) for v in chosen.elements]
    if isinstance(action, BeforeAfter):
        domains = [
            enumerate_type(env, machine.var_type(var), limits).elements for var in action.vars
        ]
        out = []
        for combo in itertools.product(*domains):
            inner = dict(env)
            for var, v in zip(action.vars, combo):
                inner[var + "'"] = v
            if eval_pred(inner, action.pred, limits):
                out.append(tuple(zip(action.vars, combo)))
        return out
    raise EvalTypeError(f"unknown action {action!r}")


def after_states(
    machine: MachineDefinition,
    state: Optional[State],
    param_bindings: Dict[str, Value],
    actions: Optional[Sequence] = None,
    limits: EvalLimits = DEFAULT_EVAL_LIMITS,
    event: Optional[EventDefinition] = None,
) -> List[State]:
    """All post-states of an action block (guards assumed to hold).

    `state` is None for the initialisation.  The result is canonically
    sorted and duplicate-free, so it is deterministic across runs.
    """
    if actions is None:
        if event is None:
            raise ValueError("need actions or event")
        actions = event.actions
    if state is None:
        env = machine_env(machine)
        pre: Dict[str, Value] = {}
    else:
        env = state_env(machine, state)
        pre = dict(zip(state.names, state.values))
    env.update(param_bindings)
    names = machine.variable_names()
    per_action = [_action_updates(machine, env, a, limits) for a in actions]
    results: Dict[bytes, State] = {}
    for combo in itertools.product(*per_action):
        bindings = dict(pre)
        for updates in combo:
            bindings.update(updates)
        s = State.from_bindings(names, bindings)
        results[s.canonical_key()] = s
    return [results[k] for k in sorted(results)]


def guards_hold(
    machine: MachineDefinition,
    env: Env,
    event: EventDefinition,
    limits: EvalLimits = DEFAULT_EVAL_LIMITS,
    warnings: Optional[List[str]] = None,
) -> bool:
    """Evaluate the guard list in order, stopping at the first false guard.
    Well-definedness errors make the offending guard false."""
    for label, pred in event.guards:
        try:
            if not eval_pred(env, pred, limits):
                return False
        except GUARD_FALSE_ERRORS as exc:
            if warnings is not None:
                warnings.append(f"{event.name}/{label}: {type(exc).__name__}: {exc}")
            return False
    return True


def param_bindings_iter(
    machine: MachineDefinition, env: Env, event: EventDefinition, limits: EvalLimits
) -> Iterator[Dict[str, Value]]:
    if not event.params:
        yield {}
        return
    domains = [
        enumerate_type(env, b.domain, limits).elements for b in event.params
    ]
    names = [b.name for b in event.params]
    for combo in itertools.product(*domains):
        yield dict(zip(names, combo))


def event_successors(
    machine: MachineDefinition,
    state: State,
    event: EventDefinition,
    limits: EvalLimits = DEFAULT_EVAL_LIMITS,
    warnings: Optional[List[str]] = None,
) -> List[Tuple[Dict[str, Value], List[State]]]:
    """(binding, after-states) for every guard-true parameter binding,
    bindings in canonical enumeration order."""
    base = state_env(machine, state)
    results = []
    for binding in param_bindings_iter(machine, base, event, limits):
        env = dict(base)
        env.update(binding)
        if not guards_hold(machine, env, event, limits, warnings):
            continue
        succ = after_states(machine, state, binding, event.actions, limits)
        results.append((binding, succ))
    return results


def initial_states(
    machine: MachineDefinition, limits: EvalLimits = DEFAULT_EVAL_LIMITS
) -> List[State]:
    """All states producible by the initialisation, canonically ordered."""
    env = machine_env(machine)
    if not guards_hold(machine, env, machine.init, limits):
        return []
    return after_states(machine, None, {}, machine.init.actions, limits)


def invariant_status(
    machine: MachineDefinition,
    state: State,
    limits: EvalLimits = DEFAULT_EVAL_LIMITS,
    include_typing: bool = True,
) -> Dict[str, object]:
    """Per-label verdict for a state: True, False, or an error string
    (well-definedness failure)."""
    env = state_env(machine, state)
    out: Dict[str, object] = {}
    if include_typing:
        for v in machine.variables:
            try:
                fast = _member_fast(env, state.get(v.name), v.type_expr, limits)
                if fast is None:
                    fast = state.get(v.name) in enumerate_type(env, v.type_expr, limits)
                out[f"typeof_{v.name}"] = bool(fast)
            except GUARD_FALSE_ERRORS as exc:
                out[f"typeof_{v.name}"] = f"{type(exc).__name__}: {exc}"
    for label, pred in machine.invariants:
        try:
            out[label] = eval_pred(env, pred, limits)
        except GUARD_FALSE_ERRORS as exc:
            out[label] = f"{type(exc).__name__}: {exc}"
    return out
