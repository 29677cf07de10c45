"""Abstract syntax for machines, contexts, expressions and predicates.

Nodes carry an optional SourceSpan used for error reporting; spans never
participate in structural equality, so `parse(pretty(ast)) == ast` holds for
well-formed trees regardless of layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import (
    DuplicateAssignment,
    DuplicateLabel,
    IllFormedModel,
    SourceSpan,
    UnresolvedSymbol,
)
from .values import Atom, FinSet, Value, canonical_text

# ---------------------------------------------------------------------------
# expressions


@dataclass(eq=True)
class Expr:
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(eq=True)
class NameRef(Expr):
    """Reference to a variable, parameter, bound name, atom, set or constant."""

    name: str = ""


@dataclass(eq=True)
class PrimedRef(Expr):
    """Post-state reference x'; only legal inside a before-after predicate."""

    name: str = ""


@dataclass(eq=True)
class NatLit(Expr):
    n: int = 0


@dataclass(eq=True)
class PairExpr(Expr):
    left: "ExprT" = None  # type: ignore[assignment]
    right: "ExprT" = None  # type: ignore[assignment]


@dataclass(eq=True)
class SetLit(Expr):
    elements: List["ExprT"] = field(default_factory=list)


@dataclass(eq=True)
class Binder:
    name: str
    domain: "ExprT"
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class SetComp(Expr):
    """{ binders | pred . result }; result defaults to the single binder."""

    binders: List[Binder] = field(default_factory=list)
    pred: "PredT" = None  # type: ignore[assignment]
    result: Optional["ExprT"] = None


#: unary operators: ran, dom, min, card, inv (postfix ~)
@dataclass(eq=True)
class UnaryOp(Expr):
    op: str = ""
    arg: "ExprT" = None  # type: ignore[assignment]


#: binary operators: apply f(x), image f[S], union, inter, prod ><,
#: interval .., add +, funspace -->, pfunspace +->
@dataclass(eq=True)
class BinOp(Expr):
    op: str = ""
    left: "ExprT" = None  # type: ignore[assignment]
    right: "ExprT" = None  # type: ignore[assignment]


ExprT = Union[NameRef, PrimedRef, NatLit, PairExpr, SetLit, SetComp, UnaryOp, BinOp]

# ---------------------------------------------------------------------------
# predicates


@dataclass(eq=True)
class Pred:
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(eq=True)
class BoolLit(Pred):
    value: bool = True


#: comparison operators: = /= : /: <: < <= > >=
@dataclass(eq=True)
class Compare(Pred):
    op: str = ""
    left: ExprT = None  # type: ignore[assignment]
    right: ExprT = None  # type: ignore[assignment]


@dataclass(eq=True)
class NotP(Pred):
    arg: "PredT" = None  # type: ignore[assignment]


@dataclass(eq=True)
class AndP(Pred):
    left: "PredT" = None  # type: ignore[assignment]
    right: "PredT" = None  # type: ignore[assignment]


@dataclass(eq=True)
class OrP(Pred):
    left: "PredT" = None  # type: ignore[assignment]
    right: "PredT" = None  # type: ignore[assignment]


@dataclass(eq=True)
class ImpP(Pred):
    left: "PredT" = None  # type: ignore[assignment]
    right: "PredT" = None  # type: ignore[assignment]


@dataclass(eq=True)
class Quant(Pred):
    """! (forall) or # (exists) with typed binders."""

    kind: str = "all"
    binders: List[Binder] = field(default_factory=list)
    body: "PredT" = None  # type: ignore[assignment]


PredT = Union[BoolLit, Compare, NotP, AndP, OrP, ImpP, Quant]

# ---------------------------------------------------------------------------
# actions, events, machines, contexts


@dataclass(eq=True)
class Assign:
    var: str
    expr: ExprT
    label: str = ""
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class ChooseIn:
    var: str
    set_expr: ExprT
    label: str = ""
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class BeforeAfter:
    vars: List[str]
    pred: PredT
    label: str = ""
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


ActionDefinition = Union[Assign, ChooseIn, BeforeAfter]


def assigned_vars(action: ActionDefinition) -> List[str]:
    if isinstance(action, (Assign, ChooseIn)):
        return [action.var]
    return list(action.vars)


@dataclass(eq=True)
class EventDefinition:
    name: str
    refines_event: Optional[str] = None
    is_new: bool = False
    params: List[Binder] = field(default_factory=list)
    guards: List[Tuple[str, PredT]] = field(default_factory=list)
    actions: List[ActionDefinition] = field(default_factory=list)
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class VarDecl:
    name: str
    type_expr: ExprT
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class ContextDefinition:
    name: str
    extends: Optional[str] = None
    carrier_sets: Dict[str, List[str]] = field(default_factory=dict)
    constants: Dict[str, Value] = field(default_factory=dict)
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def symbol_env(self, seen: Dict[str, "ContextDefinition"] | None = None) -> Dict[str, Value]:
        """Symbols this context (plus its extends chain) brings into scope."""
        env: Dict[str, Value] = {}
        if self.extends is not None:
            if seen is None or self.extends not in seen:
                raise UnresolvedSymbol(
                    self.span or SourceSpan("<context>", 1, 1),
                    f"extended context {self.extends!r} not provided",
                )
            env.update(seen[self.extends].symbol_env(seen))
        for set_name, atoms in self.carrier_sets.items():
            env[set_name] = FinSet(Atom(a) for a in atoms)
            for a in atoms:
                env[a] = Atom(a)
        env.update(self.constants)
        return env

    def all_carriers(self, seen: Dict[str, "ContextDefinition"] | None = None) -> Dict[str, List[str]]:
        out: Dict[str, List[str]] = {}
        if self.extends is not None and seen and self.extends in seen:
            out.update(seen[self.extends].all_carriers(seen))
        out.update(self.carrier_sets)
        return out


@dataclass(eq=True)
class MachineDefinition:
    name: str
    refines: Optional[str] = None
    sees: List[str] = field(default_factory=list)
    variables: List[VarDecl] = field(default_factory=list)
    invariants: List[Tuple[str, PredT]] = field(default_factory=list)
    init: EventDefinition = field(default_factory=lambda: EventDefinition("INITIALISATION"))
    events: List[EventDefinition] = field(default_factory=list)
    #: resolved context symbols (atoms, carrier sets, constants); not compared
    symbols: Dict[str, Value] = field(default_factory=dict, compare=False, repr=False)
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def variable_names(self) -> List[str]:
        return [v.name for v in self.variables]

    def var_type(self, name: str) -> ExprT:
        for v in self.variables:
            if v.name == name:
                return v.type_expr
        raise KeyError(name)

    def event(self, name: str) -> EventDefinition:
        for e in self.events:
            if e.name == name:
                return e
        raise KeyError(name)

    def event_names(self) -> List[str]:
        return [e.name for e in self.events]


# ---------------------------------------------------------------------------
# states


class State:
    """Total binding of a machine's variables, in declaration order."""

    __slots__ = ("names", "values", "_key")

    def __init__(self, names: Sequence[str], values: Sequence[Value]):
        if len(names) != len(values):
            raise IllFormedModel(
                SourceSpan("<state>", 1, 1), "state must bind exactly the declared variables"
            )
        self.names = tuple(names)
        self.values = tuple(values)
        self._key: Optional[bytes] = None

    @classmethod
    def from_bindings(cls, names: Sequence[str], bindings: Dict[str, Value]) -> "State":
        if set(bindings) != set(names):
            missing = set(names) - set(bindings)
            extra = set(bindings) - set(names)
            raise IllFormedModel(
                SourceSpan("<state>", 1, 1),
                f"state bindings mismatch (missing={sorted(missing)}, extra={sorted(extra)})",
            )
        return cls(names, [bindings[n] for n in names])

    @property
    def bindings(self) -> Dict[str, Value]:
        return dict(zip(self.names, self.values))

    def get(self, name: str) -> Value:
        try:
            return self.values[self.names.index(name)]
        except ValueError:
            raise KeyError(name) from None

    def replace(self, updates: Dict[str, Value]) -> "State":
        vals = list(self.values)
        for name, v in updates.items():
            vals[self.names.index(name)] = v
        return State(self.names, vals)

    def canonical_key(self) -> bytes:
        if self._key is None:
            from .values import SERIAL_VERSION

            body = "\n".join(f"{n}={canonical_text(v)}" for n, v in zip(self.names, self.values))
            self._key = (SERIAL_VERSION + "\n" + body).encode("utf-8")
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, State) and self.canonical_key() == other.canonical_key()

    def __hash__(self) -> int:
        return hash(self.canonical_key())

    def __repr__(self) -> str:
        pairs = ", ".join(f"{n}={canonical_text(v)}" for n, v in zip(self.names, self.values))
        return "State(" + pairs + ")"


def canonical_key(state: State) -> bytes:
    """Deterministic byte-string; equal states yield equal keys."""
    return state.canonical_key()


def binding_text(bindings: Dict[str, Value]) -> str:
    """Render parameter bindings deterministically, e.g. 'f={...}'."""
    return ", ".join(f"{n}={canonical_text(v)}" for n, v in sorted(bindings.items()))


# ---------------------------------------------------------------------------
# free names and well-formedness


def _walk_free(node, bound: frozenset, out: set, primed: set) -> None:
    if isinstance(node, NameRef):
        if node.name not in bound:
            out.add(node.name)
    elif isinstance(node, PrimedRef):
        primed.add(node.name)
    elif isinstance(node, (NatLit, BoolLit)):
        pass
    elif isinstance(node, PairExpr):
        _walk_free(node.left, bound, out, primed)
        _walk_free(node.right, bound, out, primed)
    elif isinstance(node, SetLit):
        for e in node.elements:
            _walk_free(e, bound, out, primed)
    elif isinstance(node, SetComp):
        inner = bound
        for b in node.binders:
            _walk_free(b.domain, inner, out, primed)
            inner = inner | {b.name}
        _walk_free(node.pred, inner, out, primed)
        if node.result is not None:
            _walk_free(node.result, inner, out, primed)
    elif isinstance(node, UnaryOp):
        _walk_free(node.arg, bound, out, primed)
    elif isinstance(node, BinOp):
        _walk_free(node.left, bound, out, primed)
        _walk_free(node.right, bound, out, primed)
    elif isinstance(node, Compare):
        _walk_free(node.left, bound, out, primed)
        _walk_free(node.right, bound, out, primed)
    elif isinstance(node, NotP):
        _walk_free(node.arg, bound, out, primed)
    elif isinstance(node, (AndP, OrP, ImpP)):
        _walk_free(node.left, bound, out, primed)
        _walk_free(node.right, bound, out, primed)
    elif isinstance(node, Quant):
        inner = bound
        for b in node.binders:
            _walk_free(b.domain, inner, out, primed)
            inner = inner | {b.name}
        _walk_free(node.body, inner, out, primed)
    else:
        raise TypeError(f"unknown AST node {node!r}")


def free_names(node) -> set:
    """Unbound plain names referenced by an expression or predicate."""
    out: set = set()
    _walk_free(node, frozenset(), out, set())
    return out


def primed_names(node) -> set:
    out: set = set()
    primed: set = set()
    _walk_free(node, frozenset(), out, primed)
    return primed


def _event_span(ev: EventDefinition) -> SourceSpan:
    return ev.span or SourceSpan("<machine>", 1, 1)


def validate_machine(m: MachineDefinition) -> None:
    """Check machine well-formedness rules beyond what the grammar enforces."""
    span = m.span or SourceSpan("<machine>", 1, 1)
    var_names = m.variable_names()
    if len(set(var_names)) != len(var_names):
        raise IllFormedModel(span, "duplicate variable names")
    declared = set(var_names) | set(m.symbols)

    def check_scope(node, extra: set, where: str, allow_primed: set | None = None) -> None:
        out: set = set()
        primed: set = set()
        _walk_free(node, frozenset(extra), out, primed)
        for n in sorted(out - declared):
            raise UnresolvedSymbol(getattr(node, "span", None) or span, f"{n!r} in {where}")
        if allow_primed is None:
            if primed:
                raise IllFormedModel(
                    getattr(node, "span", None) or span,
                    f"primed reference outside a before-after predicate in {where}",
                )
        else:
            for n in sorted(primed - allow_primed):
                raise IllFormedModel(
                    getattr(node, "span", None) or span,
                    f"primed reference {n}' is not an assigned variable in {where}",
                )

    for v in m.variables:
        check_scope(v.type_expr, set(), f"type of {v.name}")

    seen_labels: set = set()
    for label, pred in m.invariants:
        if label in seen_labels:
            raise DuplicateLabel(span, f"invariant label {label!r}")
        seen_labels.add(label)
        check_scope(pred, set(), f"invariant {label}")

    for ev in [m.init] + m.events:
        ev_span = _event_span(ev)
        param_names = [b.name for b in ev.params]
        if len(set(param_names)) != len(param_names):
            raise DuplicateLabel(ev_span, f"duplicate parameter in {ev.name}")
        for b in ev.params:
            if b.name in declared:
                raise IllFormedModel(ev_span, f"parameter {b.name!r} shadows a declared symbol")
            check_scope(b.domain, set(), f"parameter {b.name} of {ev.name}")
        scope = set(param_names)
        glabels: set = set()
        for label, pred in ev.guards:
            if label in glabels:
                raise DuplicateLabel(ev_span, f"guard label {label!r} in {ev.name}")
            glabels.add(label)
            check_scope(pred, scope, f"guard {label} of {ev.name}")
        targets: set = set()
        alabels: set = set()
        for act in ev.actions:
            if act.label:
                if act.label in alabels:
                    raise DuplicateLabel(act.span or ev_span, f"action label {act.label!r} in {ev.name}")
                alabels.add(act.label)
            for t in assigned_vars(act):
                if t in targets:
                    raise DuplicateAssignment(
                        act.span or ev_span, f"variable {t!r} assigned twice in {ev.name}"
                    )
                targets.add(t)
                if t not in var_names:
                    raise UnresolvedSymbol(act.span or ev_span, f"assignment to undeclared {t!r}")
            if isinstance(act, Assign):
                check_scope(act.expr, scope, f"action {act.label or act.var} of {ev.name}")
            elif isinstance(act, ChooseIn):
                check_scope(act.set_expr, scope, f"action {act.label or act.var} of {ev.name}")
            else:
                check_scope(
                    act.pred,
                    scope,
                    f"action {act.label or ','.join(act.vars)} of {ev.name}",
                    allow_primed=set(act.vars),
                )

    # initialisation must assign every variable and read none
    init_targets: set = set()
    for act in m.init.actions:
        init_targets.update(assigned_vars(act))
    missing = set(var_names) - init_targets
    if missing:
        raise IllFormedModel(_event_span(m.init), f"init does not assign {sorted(missing)}")
    for label, pred in m.init.guards:
        if free_names(pred) & set(var_names):
            raise IllFormedModel(_event_span(m.init), f"init guard {label} references variables")
    for act in m.init.actions:
        node = act.expr if isinstance(act, Assign) else act.set_expr if isinstance(act, ChooseIn) else act.pred
        if free_names(node) & set(var_names):
            raise IllFormedModel(
                _event_span(m.init), f"init action {act.label or '?'} reads a variable"
            )
