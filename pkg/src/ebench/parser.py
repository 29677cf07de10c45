"""Parser for the .ebm/.ebc model language and .ovl overlays.

Line-oriented surface syntax: a clause ends at a newline unless the newline
sits inside brackets.  The full grammar ships in docs/grammar.ebnf.  Every
token carries a 1-based SourceSpan used verbatim in error messages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import (
    DuplicateLabel,
    EbSyntaxError,
    IllFormedModel,
    SourceSpan,
    UnresolvedSymbol,
)
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
    VarDecl,
    validate_machine,
)
from .values import Value

KEYWORDS = {
    "machine",
    "context",
    "refines",
    "extends",
    "sees",
    "variables",
    "invariants",
    "init",
    "event",
    "any",
    "when",
    "where",
    "then",
    "end",
    "new",
    "sets",
    "constants",
    "not",
    "true",
    "false",
    "ran",
    "dom",
    "min",
    "card",
    "overlay",
    "on",
}

_SYMBOLS = [
    "|->",
    "-->",
    "+->",
    ":=",
    "::",
    ":|",
    "><",
    "..",
    "/\\",
    "\\/",
    "/=",
    "/:",
    "<:",
    "<=",
    ">=",
    "=>",
    "(",
    ")",
    "{",
    "}",
    "[",
    "]",
    ",",
    ".",
    ":",
    "=",
    "<",
    ">",
    "+",
    "~",
    "!",
    "#",
    "|",
]

_EXPR_RELOPS = {"=", "/=", ":", "/:", "<:", "<", "<=", ">", ">="}


@dataclass
class Token:
    kind: str  # 'ident', 'keyword', 'nat', 'primed', 'sym', 'newline', 'eof'
    text: str
    span: SourceSpan


def tokenize(text: str, file: str = "<input>") -> List[Token]:
    tokens: List[Token] = []
    line, col = 1, 1
    i = 0
    depth = 0
    n = len(text)

    def span(length: int) -> SourceSpan:
        return SourceSpan(file, line, col, length)

    while i < n:
        c = text[i]
        if c == "\n":
            if depth == 0 and tokens and tokens[-1].kind != "newline":
                tokens.append(Token("newline", "\n", span(1)))
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if c.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            tok = text[start:i]
            tokens.append(Token("nat", tok, span(len(tok))))
            col += len(tok)
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            if i < n and text[i] == "'":
                i += 1
                tokens.append(Token("primed", word, span(len(word) + 1)))
                col += len(word) + 1
            else:
                kind = "keyword" if word in KEYWORDS else "ident"
                tokens.append(Token(kind, word, span(len(word))))
                col += len(word)
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                if sym in "({[":
                    depth += 1
                elif sym in ")}]":
                    depth = max(0, depth - 1)
                tokens.append(Token("sym", sym, span(len(sym))))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise EbSyntaxError(span(1), "a token", repr(c))
    if tokens and tokens[-1].kind != "newline":
        tokens.append(Token("newline", "\n", SourceSpan(file, line, col)))
    tokens.append(Token("eof", "", SourceSpan(file, line, col)))
    return tokens


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    # --- token helpers ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at_sym(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "sym" and t.text == text

    def at_kw(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "keyword" and t.text == text

    def expect_sym(self, text: str) -> Token:
        t = self.peek()
        if not self.at_sym(text):
            raise EbSyntaxError(t.span, repr(text), repr(t.text or t.kind))
        return self.next()

    def expect_kw(self, text: str) -> Token:
        t = self.peek()
        if not self.at_kw(text):
            raise EbSyntaxError(t.span, repr(text), repr(t.text or t.kind))
        return self.next()

    def expect_ident(self, what: str = "an identifier") -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise EbSyntaxError(t.span, what, repr(t.text or t.kind))
        return self.next()

    def expect_newline(self) -> None:
        t = self.peek()
        if t.kind == "eof":
            return
        if t.kind != "newline":
            raise EbSyntaxError(t.span, "end of line", repr(t.text))
        while self.peek().kind == "newline":
            self.next()

    def skip_newlines(self) -> None:
        while self.peek().kind == "newline":
            self.next()

    # --- predicates -------------------------------------------------------

    def parse_pred(self):
        left = self._pred_or()
        if self.at_sym("=>"):
            sp = self.next().span
            right = self.parse_pred()
            return ImpP(left, right, span=sp)
        return left

    def _pred_or(self):
        left = self._pred_and()
        while self.at_sym("\\/"):
            sp = self.next().span
            left = OrP(left, self._pred_and(), span=sp)
        return left

    def _pred_and(self):
        left = self._pred_unit()
        while self.at_sym("/\\"):
            sp = self.next().span
            left = AndP(left, self._pred_unit(), span=sp)
        return left

    def _pred_unit(self):
        t = self.peek()
        if self.at_kw("not"):
            sp = self.next().span
            self.expect_sym("(")
            inner = self.parse_pred()
            self.expect_sym(")")
            return NotP(inner, span=sp)
        if self.at_kw("true"):
            return BoolLit(True, span=self.next().span)
        if self.at_kw("false"):
            return BoolLit(False, span=self.next().span)
        if self.at_sym("!") or self.at_sym("#"):
            kind = "all" if self.next().text == "!" else "ex"
            binders = self._parse_binders()
            self.expect_sym(".")
            body = self.parse_pred()
            return Quant(kind, binders, body, span=t.span)
        if self.at_sym("("):
            # try a parenthesized predicate; fall back to a comparison
            save = self.pos
            try:
                self.next()
                inner = self.parse_pred()
                self.expect_sym(")")
                return inner
            except EbSyntaxError:
                self.pos = save
        return self._comparison()

    def _comparison(self):
        t = self.peek()
        left = self.parse_operand()
        op_tok = self.peek()
        if op_tok.kind == "sym" and op_tok.text in _EXPR_RELOPS:
            self.next()
            right = self.parse_operand()
            return Compare(op_tok.text, left, right, span=op_tok.span)
        raise EbSyntaxError(op_tok.span, "a comparison operator", repr(op_tok.text or op_tok.kind))

    def _parse_binders(self) -> List[Binder]:
        binders = [self._parse_binder()]
        while self.at_sym(","):
            self.next()
            binders.append(self._parse_binder())
        return binders

    def _parse_binder(self) -> Binder:
        name = self.expect_ident("a binder name")
        self.expect_sym(":")
        domain = self.parse_operand()
        return Binder(name.text, domain, span=name.span)

    # --- expressions --------------------------------------------------------
    # full expression (action right-hand sides, set elements, results):
    #   setop level admits union/intersection; comparison operands do not,
    #   so /\ and \/ stay unambiguous inside predicates.

    def parse_expr(self):
        left = self.parse_operand()
        while self.at_sym("\\/") or self.at_sym("/\\"):
            tok = self.next()
            op = "union" if tok.text == "\\/" else "inter"
            left = BinOp(op, left, self.parse_operand(), span=tok.span)
        return left

    def parse_operand(self):
        return self._funspace()

    def _funspace(self):
        left = self._maplet()
        if self.at_sym("-->") or self.at_sym("+->"):
            tok = self.next()
            op = "funspace" if tok.text == "-->" else "pfunspace"
            right = self._funspace()
            return BinOp(op, left, right, span=tok.span)
        return left

    def _maplet(self):
        left = self._prod()
        while self.at_sym("|->"):
            sp = self.next().span
            left = PairExpr(left, self._prod(), span=sp)
        return left

    def _prod(self):
        left = self._interval()
        while self.at_sym("><"):
            sp = self.next().span
            left = BinOp("prod", left, self._interval(), span=sp)
        return left

    def _interval(self):
        left = self._add()
        if self.at_sym(".."):
            sp = self.next().span
            return BinOp("interval", left, self._add(), span=sp)
        return left

    def _add(self):
        left = self._postfix()
        while self.at_sym("+"):
            sp = self.next().span
            left = BinOp("add", left, self._postfix(), span=sp)
        return left

    def _postfix(self):
        e = self._primary()
        while True:
            if self.at_sym("("):
                sp = self.next().span
                arg = self.parse_expr()
                self.expect_sym(")")
                e = BinOp("apply", e, arg, span=sp)
            elif self.at_sym("["):
                sp = self.next().span
                arg = self.parse_expr()
                self.expect_sym("]")
                e = BinOp("image", e, arg, span=sp)
            elif self.at_sym("~"):
                sp = self.next().span
                e = UnaryOp("inv", e, span=sp)
            else:
                return e

    def _primary(self):
        t = self.peek()
        if t.kind == "nat":
            self.next()
            return NatLit(int(t.text), span=t.span)
        if t.kind == "primed":
            self.next()
            return PrimedRef(t.text, span=t.span)
        if t.kind == "ident":
            self.next()
            return NameRef(t.text, span=t.span)
        if t.kind == "keyword" and t.text in ("ran", "dom", "min", "card"):
            self.next()
            self.expect_sym("(")
            arg = self.parse_expr()
            self.expect_sym(")")
            return UnaryOp(t.text, arg, span=t.span)
        if self.at_sym("("):
            self.next()
            e = self.parse_expr()
            self.expect_sym(")")
            return e
        if self.at_sym("{"):
            return self._set_like()
        raise EbSyntaxError(t.span, "an expression", repr(t.text or t.kind))

    def _set_like(self):
        open_tok = self.expect_sym("{")
        if self.at_sym("}"):
            self.next()
            return SetLit([], span=open_tok.span)
        # comprehension iff the set starts 'ident :' (expressions cannot)
        if self.peek().kind == "ident" and self.peek(1).kind == "sym" and self.peek(1).text == ":":
            binders = self._parse_binders()
            self.expect_sym("|")
            pred = self.parse_pred()
            result = None
            if self.at_sym("."):
                self.next()
                result = self.parse_expr()
            self.expect_sym("}")
            return SetComp(binders, pred, result, span=open_tok.span)
        elems = [self.parse_expr()]
        while self.at_sym(","):
            self.next()
            elems.append(self.parse_expr())
        self.expect_sym("}")
        return SetLit(elems, span=open_tok.span)

    # --- labeled lines ------------------------------------------------------

    def _labeled_pred(self) -> Tuple[str, object]:
        label = self.expect_ident("a label")
        self.expect_sym(":")
        pred = self.parse_pred()
        self.expect_newline()
        return label.text, pred

    def _labeled_action(self):
        label = self.expect_ident("an action label")
        self.expect_sym(":")
        first = self.expect_ident("a variable name")
        if self.at_sym(","):
            names = [first.text]
            while self.at_sym(","):
                self.next()
                names.append(self.expect_ident("a variable name").text)
            tok = self.expect_sym(":|")
            pred = self.parse_pred()
            self.expect_newline()
            return BeforeAfter(names, pred, label=label.text, span=tok.span)
        t = self.peek()
        if self.at_sym(":="):
            self.next()
            expr = self.parse_expr()
            self.expect_newline()
            return Assign(first.text, expr, label=label.text, span=t.span)
        if self.at_sym("::"):
            self.next()
            expr = self.parse_expr()
            self.expect_newline()
            return ChooseIn(first.text, expr, label=label.text, span=t.span)
        if self.at_sym(":|"):
            self.next()
            pred = self.parse_pred()
            self.expect_newline()
            return BeforeAfter([first.text], pred, label=label.text, span=t.span)
        raise EbSyntaxError(t.span, "':=', '::' or ':|'", repr(t.text or t.kind))

    # --- events ---------------------------------------------------------------

    def _event_body(self, ev: EventDefinition, allow_params: bool) -> None:
        self.skip_newlines()
        if self.at_kw("any"):
            if not allow_params:
                raise EbSyntaxError(self.peek().span, "'then' (init takes no parameters)")
            self.next()
            self.expect_newline()
            while self.peek().kind == "ident":
                ev.params.append(self._param_decl())
            if not ev.params:
                raise EbSyntaxError(self.peek().span, "at least one parameter after 'any'")
        if self.at_kw("when") or self.at_kw("where"):
            kw = self.next()
            if ev.params and kw.text != "where":
                raise EbSyntaxError(kw.span, "'where' (event has parameters)")
            if not ev.params and kw.text != "when":
                raise EbSyntaxError(kw.span, "'when' (event has no parameters)")
            self.expect_newline()
            guard_count = 0
            while self.peek().kind == "ident":
                ev.guards.append(self._labeled_pred())
                guard_count += 1
            if guard_count == 0:
                raise EbSyntaxError(
                    kw.span, f"at least one guard (omit '{kw.text}' for an unguarded event)"
                )
        self.skip_newlines()
        then = self.expect_kw("then")
        self.expect_newline()
        while self.peek().kind == "ident":
            ev.actions.append(self._labeled_action())
        if not ev.actions:
            raise EbSyntaxError(then.span, "at least one action after 'then'")
        self.expect_kw("end")
        self.expect_newline()

    def _param_decl(self) -> Binder:
        name = self.expect_ident("a parameter name")
        self.expect_sym(":")
        domain = self.parse_operand()
        self.expect_newline()
        return Binder(name.text, domain, span=name.span)

    def parse_event(self) -> EventDefinition:
        kw = self.expect_kw("event")
        name = self.expect_ident("an event name")
        ev = EventDefinition(name.text, span=kw.span)
        if self.at_kw("extends") or self.at_kw("refines"):
            self.next()
            ev.refines_event = self.expect_ident("an abstract event name").text
        elif self.at_kw("new"):
            self.next()
            ev.is_new = True
        self.expect_newline()
        self._event_body(ev, allow_params=True)
        return ev

    # --- machines ---------------------------------------------------------------

    def parse_machine_def(self, contexts: Dict[str, ContextDefinition], file: str) -> MachineDefinition:
        self.skip_newlines()
        kw = self.expect_kw("machine")
        name = self.expect_ident("a machine name")
        m = MachineDefinition(name.text, span=kw.span)
        if self.at_kw("refines"):
            self.next()
            m.refines = self.expect_ident("a machine name").text
        if self.at_kw("sees"):
            self.next()
            m.sees.append(self.expect_ident("a context name").text)
            while self.at_sym(","):
                self.next()
                m.sees.append(self.expect_ident("a context name").text)
        self.expect_newline()

        for ctx_name in m.sees:
            if ctx_name not in contexts:
                raise UnresolvedSymbol(kw.span, f"context {ctx_name!r} not provided")
            m.symbols.update(contexts[ctx_name].symbol_env(contexts))

        self.expect_kw("variables")
        self.expect_newline()
        while self.peek().kind == "ident":
            vname = self.next()
            self.expect_sym(":")
            vtype = self.parse_operand()
            self.expect_newline()
            m.variables.append(VarDecl(vname.text, vtype, span=vname.span))
        self.skip_newlines()
        if self.at_kw("invariants"):
            self.next()
            self.expect_newline()
            while self.peek().kind == "ident":
                m.invariants.append(self._labeled_pred())
        self.skip_newlines()
        init_kw = self.expect_kw("init")
        self.expect_newline()
        m.init = EventDefinition("INITIALISATION", span=init_kw.span)
        self._event_body(m.init, allow_params=False)
        self.skip_newlines()
        while self.at_kw("event"):
            ev = self.parse_event()
            if any(e.name == ev.name for e in m.events):
                raise DuplicateLabel(ev.span or kw.span, f"event {ev.name!r}")
            m.events.append(ev)
            self.skip_newlines()
        self.expect_kw("end")
        self.skip_newlines()
        t = self.peek()
        if t.kind != "eof":
            raise EbSyntaxError(t.span, "end of file", repr(t.text))
        return m

    # --- contexts ---------------------------------------------------------------

    def parse_context_def(self, contexts: Dict[str, ContextDefinition]) -> ContextDefinition:
        self.skip_newlines()
        kw = self.expect_kw("context")
        name = self.expect_ident("a context name")
        ctx = ContextDefinition(name.text, span=kw.span)
        if self.at_kw("extends"):
            self.next()
            ctx.extends = self.expect_ident("a context name").text
            if ctx.extends not in contexts:
                raise UnresolvedSymbol(kw.span, f"context {ctx.extends!r} not provided")
        self.expect_newline()
        known_atoms: Dict[str, str] = {}
        known_sets: set = set()
        if ctx.extends:
            for sname, atoms in contexts[ctx.extends].all_carriers(contexts).items():
                known_sets.add(sname)
                for a in atoms:
                    known_atoms[a] = sname
        if self.at_kw("sets"):
            self.next()
            self.expect_newline()
            while self.peek().kind == "ident":
                sname = self.next()
                if sname.text in known_sets or sname.text in ctx.carrier_sets:
                    raise DuplicateLabel(sname.span, f"carrier set {sname.text!r}")
                self.expect_sym("=")
                self.expect_sym("{")
                atoms = [self.expect_ident("an atom").text]
                while self.at_sym(","):
                    self.next()
                    atoms.append(self.expect_ident("an atom").text)
                self.expect_sym("}")
                self.expect_newline()
                for a in atoms:
                    if a in known_atoms:
                        raise DuplicateLabel(
                            sname.span,
                            f"atom {a!r} already in carrier {known_atoms[a]!r} "
                            "(carriers must be pairwise disjoint)",
                        )
                    if atoms.count(a) != 1:
                        raise DuplicateLabel(sname.span, f"atom {a!r} repeated")
                    known_atoms[a] = sname.text
                ctx.carrier_sets[sname.text] = atoms
        self.skip_newlines()
        if self.at_kw("constants"):
            self.next()
            self.expect_newline()
            while self.peek().kind == "ident":
                cname = self.next()
                if cname.text in ctx.constants or cname.text in known_atoms or cname.text in ctx.carrier_sets:
                    raise DuplicateLabel(cname.span, f"constant {cname.text!r}")
                self.expect_sym("=")
                expr = self.parse_expr()
                self.expect_newline()
                env = ctx.symbol_env(contexts)
                from .reference import ref_eval_expr

                try:
                    ctx.constants[cname.text] = ref_eval_expr(env, expr)
                except Exception as exc:  # narrow errors wrapped with the span
                    raise IllFormedModel(cname.span, f"cannot evaluate constant: {exc}") from exc
        self.skip_newlines()
        self.expect_kw("end")
        self.skip_newlines()
        t = self.peek()
        if t.kind != "eof":
            raise EbSyntaxError(t.span, "end of file", repr(t.text))
        return ctx


# ---------------------------------------------------------------------------
# overlays


@dataclass
class EventOverlay:
    event: str
    extra_guards: List[Tuple[str, object]] = field(default_factory=list)
    replacement_actions: List[object] = field(default_factory=list)
    span: Optional[SourceSpan] = None


@dataclass
class Overlay:
    name: str
    target: str
    events: List[EventOverlay] = field(default_factory=list)
    span: Optional[SourceSpan] = None


def parse_overlay(text: str, file: str = "<overlay>") -> Overlay:
    p = _Parser(tokenize(text, file))
    p.skip_newlines()
    kw = p.expect_kw("overlay")
    name = p.expect_ident("an overlay name")
    p.expect_kw("on")
    target = p.expect_ident("a machine name")
    p.expect_newline()
    ov = Overlay(name.text, target.text, span=kw.span)
    p.skip_newlines()
    while p.at_kw("event") or p.at_kw("init"):
        if p.at_kw("init"):
            etok = p.next()
            ev_over = EventOverlay("INITIALISATION", span=etok.span)
        else:
            p.next()
            ename = p.expect_ident("an event name")
            ev_over = EventOverlay(ename.text, span=ename.span)
        p.expect_newline()
        p.skip_newlines()
        if p.at_kw("where") or p.at_kw("when"):
            p.next()
            p.expect_newline()
            while p.peek().kind == "ident":
                ev_over.extra_guards.append(p._labeled_pred())
        p.skip_newlines()
        if p.at_kw("then"):
            p.next()
            p.expect_newline()
            while p.peek().kind == "ident":
                ev_over.replacement_actions.append(p._labeled_action())
        p.expect_kw("end")
        p.expect_newline()
        p.skip_newlines()
        ov.events.append(ev_over)
    p.expect_kw("end")
    p.skip_newlines()
    t = p.peek()
    if t.kind != "eof":
        raise EbSyntaxError(t.span, "end of file", repr(t.text))
    return ov


# ---------------------------------------------------------------------------
# entry points


def parse_machine(
    text: str,
    contexts: Dict[str, ContextDefinition] | None = None,
    file: str = "<machine>",
) -> MachineDefinition:
    """Parse a machine source; resolves symbols against the seen contexts and
    validates well-formedness."""
    p = _Parser(tokenize(text, file))
    m = p.parse_machine_def(contexts or {}, file)
    validate_machine(m)
    return m


def parse_context(text: str, contexts: Dict[str, ContextDefinition] | None = None, file: str = "<context>") -> ContextDefinition:
    p = _Parser(tokenize(text, file))
    return p.parse_context_def(contexts or {})


def parse_pred_text(
    text: str, symbols: Dict[str, Value] | None = None, file: str = "<pred>"
):
    """Parse a standalone predicate (requirement goals, CLI arguments)."""
    toks = [t for t in tokenize(text, file) if t.kind != "newline"]
    p = _Parser(toks)
    pred = p.parse_pred()
    t = p.peek()
    if t.kind != "eof":
        raise EbSyntaxError(t.span, "end of predicate", repr(t.text))
    return pred


def parse_expr_text(text: str, file: str = "<expr>"):
    toks = [t for t in tokenize(text, file) if t.kind != "newline"]
    p = _Parser(toks)
    expr = p.parse_expr()
    t = p.peek()
    if t.kind != "eof":
        raise EbSyntaxError(t.span, "end of expression", repr(t.text))
    return expr
