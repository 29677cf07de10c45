"""Canonical pretty-printer for machines, contexts and overlay files.

`parse(pretty(parse(text)))` equals `parse(text)` structurally, and pretty
is idempotent on its own output.
"""

from __future__ import annotations

from typing import List

from .machine import (
    AndP,
    Assign,
    BeforeAfter,
    BinOp,
    Binder,
    BoolLit,
    ChooseIn,
    Compare,
    ContextDefinition,
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
    UnaryOp,
)
from .values import canonical_text

# expression precedence levels; higher binds tighter
_L_SETOP = 1
_L_FUNSPACE = 2
_L_MAPLET = 3
_L_PROD = 4
_L_INTERVAL = 5
_L_ADD = 6
_L_POSTFIX = 7

_BIN_LEVEL = {
    "union": _L_SETOP,
    "inter": _L_SETOP,
    "funspace": _L_FUNSPACE,
    "pfunspace": _L_FUNSPACE,
    "prod": _L_PROD,
    "interval": _L_INTERVAL,
    "add": _L_ADD,
    "apply": _L_POSTFIX,
    "image": _L_POSTFIX,
}

_BIN_TOKEN = {
    "union": "\\/",
    "inter": "/\\",
    "funspace": "-->",
    "pfunspace": "+->",
    "prod": "><",
    "interval": "..",
    "add": "+",
}


def expr_text(e, min_level: int = _L_SETOP) -> str:
    if isinstance(e, NameRef):
        return e.name
    if isinstance(e, PrimedRef):
        return e.name + "'"
    if isinstance(e, NatLit):
        return str(e.n)
    if isinstance(e, SetLit):
        return "{" + ", ".join(expr_text(x, _L_SETOP) for x in e.elements) + "}"
    if isinstance(e, SetComp):
        binders = ", ".join(_binder_text(b) for b in e.binders)
        body = pred_text(e.pred)
        if e.result is not None:
            return "{ " + binders + " | " + body + " . " + expr_text(e.result, _L_SETOP) + " }"
        return "{ " + binders + " | " + body + " }"
    if isinstance(e, PairExpr):
        inner = expr_text(e.left, _L_MAPLET) + " |-> " + expr_text(e.right, _L_MAPLET + 1)
        return _wrap(inner, _L_MAPLET, min_level)
    if isinstance(e, UnaryOp):
        if e.op == "inv":
            return _wrap(expr_text(e.arg, _L_POSTFIX) + "~", _L_POSTFIX, min_level)
        return f"{e.op}({expr_text(e.arg, _L_SETOP)})"
    if isinstance(e, BinOp):
        if e.op == "apply":
            return _wrap(
                expr_text(e.left, _L_POSTFIX) + "(" + expr_text(e.right, _L_SETOP) + ")",
                _L_POSTFIX,
                min_level,
            )
        if e.op == "image":
            return _wrap(
                expr_text(e.left, _L_POSTFIX) + "[" + expr_text(e.right, _L_SETOP) + "]",
                _L_POSTFIX,
                min_level,
            )
        level = _BIN_LEVEL[e.op]
        if e.op in ("funspace", "pfunspace"):  # right associative
            inner = expr_text(e.left, level + 1) + f" {_BIN_TOKEN[e.op]} " + expr_text(e.right, level)
        elif e.op == "interval":  # non-associative
            inner = expr_text(e.left, level + 1) + ".." + expr_text(e.right, level + 1)
        else:  # left associative
            inner = expr_text(e.left, level) + f" {_BIN_TOKEN[e.op]} " + expr_text(e.right, level + 1)
        return _wrap(inner, level, min_level)
    raise TypeError(f"not an expression node: {e!r}")


def _wrap(text: str, level: int, min_level: int) -> str:
    return "(" + text + ")" if level < min_level else text


def _binder_text(b: Binder) -> str:
    return f"{b.name} : {expr_text(b.domain, _L_FUNSPACE)}"


# predicate levels: imp=1, or=2, and=3, unit=4
def pred_text(p, min_level: int = 1) -> str:
    if isinstance(p, BoolLit):
        return "true" if p.value else "false"
    if isinstance(p, Compare):
        return expr_text(p.left, _L_FUNSPACE) + f" {p.op} " + expr_text(p.right, _L_FUNSPACE)
    if isinstance(p, NotP):
        return "not (" + pred_text(p.arg, 1) + ")"
    if isinstance(p, AndP):
        inner = pred_text(p.left, 3) + " /\\ " + pred_text(p.right, 4)
        return _wrap(inner, 3, min_level)
    if isinstance(p, OrP):
        inner = pred_text(p.left, 2) + " \\/ " + pred_text(p.right, 3)
        return _wrap(inner, 2, min_level)
    if isinstance(p, ImpP):
        inner = pred_text(p.left, 2) + " => " + pred_text(p.right, 1)
        return _wrap(inner, 1, min_level)
    if isinstance(p, Quant):
        mark = "!" if p.kind == "all" else "#"
        inner = mark + ", ".join(_binder_text(b) for b in p.binders) + ". " + pred_text(p.body, 1)
        return _wrap(inner, 1, min_level)
    raise TypeError(f"not a predicate node: {p!r}")


def _action_text(a) -> str:
    if isinstance(a, Assign):
        return f"{a.label}: {a.var} := {expr_text(a.expr)}"
    if isinstance(a, ChooseIn):
        return f"{a.label}: {a.var} :: {expr_text(a.set_expr)}"
    if isinstance(a, BeforeAfter):
        return f"{a.label}: {', '.join(a.vars)} :| ({pred_text(a.pred)})"
    raise TypeError(f"not an action: {a!r}")


def _event_lines(ev: EventDefinition, header: str) -> List[str]:
    lines = [header]
    if ev.params:
        lines.append("  any")
        for b in ev.params:
            lines.append(f"    {_binder_text(b)}")
    if ev.guards:
        lines.append("  where" if ev.params else "  when")
        for label, pred in ev.guards:
            lines.append(f"    {label}: {pred_text(pred)}")
    lines.append("  then")
    for act in ev.actions:
        lines.append(f"    {_action_text(act)}")
    lines.append("  end")
    return lines


def pretty_machine(m: MachineDefinition) -> str:
    header = f"machine {m.name}"
    if m.refines:
        header += f" refines {m.refines}"
    if m.sees:
        header += " sees " + ", ".join(m.sees)
    lines = [header, ""]
    lines.append("variables")
    for v in m.variables:
        lines.append(f"  {v.name} : {expr_text(v.type_expr, _L_FUNSPACE)}")
    if m.invariants:
        lines.append("")
        lines.append("invariants")
        for label, pred in m.invariants:
            lines.append(f"  {label}: {pred_text(pred)}")
    lines.append("")
    lines.extend(_event_lines(m.init, "init"))
    for ev in m.events:
        suffix = ""
        if ev.refines_event:
            suffix = f" extends {ev.refines_event}"
        elif ev.is_new:
            suffix = " new"
        lines.append("")
        lines.extend(_event_lines(ev, f"event {ev.name}{suffix}"))
    lines.append("")
    lines.append("end")
    return "\n".join(lines) + "\n"


def pretty_context(c: ContextDefinition) -> str:
    header = f"context {c.name}"
    if c.extends:
        header += f" extends {c.extends}"
    lines = [header]
    if c.carrier_sets:
        lines.append("")
        lines.append("sets")
        for name, atoms in c.carrier_sets.items():
            lines.append(f"  {name} = {{ " + ", ".join(atoms) + " }")
    if c.constants:
        lines.append("")
        lines.append("constants")
        for name, value in c.constants.items():
            lines.append(f"  {name} = {canonical_text(value)}")
    lines.append("")
    lines.append("end")
    return "\n".join(lines) + "\n"


def pretty_print(definition) -> str:
    if isinstance(definition, MachineDefinition):
        return pretty_machine(definition)
    if isinstance(definition, ContextDefinition):
        return pretty_context(definition)
    raise TypeError(f"cannot pretty-print {definition!r}")
