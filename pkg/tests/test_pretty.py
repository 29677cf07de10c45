"""Round-trip fixpoint and idempotence of the pretty-printer."""

import pytest

from ebench.catalog import CATALOG, _read_source, load_contexts
from ebench.machine import Assign, EventDefinition, MachineDefinition, VarDecl
from ebench.parser import parse_context, parse_machine
from ebench.pretty import pretty_print

CTXS = load_contexts()

MACHINE_FILES = [e.source_file for e in CATALOG if e.kind == "machine"]
CONTEXT_FILES = [e.source_file for e in CATALOG if e.kind == "context"]


@pytest.mark.parametrize("file_name", MACHINE_FILES)
def test_machine_roundtrip_fixpoint(file_name):
    text = _read_source(file_name)
    ast1 = parse_machine(text, CTXS, file=file_name)
    printed = pretty_print(ast1)
    ast2 = parse_machine(printed, CTXS, file=file_name + "#pretty")
    assert ast1 == ast2
    # idempotence: pretty(parse(pretty(x))) == pretty(x)
    assert pretty_print(ast2) == printed


@pytest.mark.parametrize("file_name", CONTEXT_FILES)
def test_context_roundtrip_fixpoint(file_name):
    text = _read_source(file_name)
    ast1 = parse_context(text, CTXS, file=file_name)
    printed = pretty_print(ast1)
    ast2 = parse_context(printed, CTXS, file=file_name + "#pretty")
    assert ast1 == ast2
    assert pretty_print(ast2) == printed


def test_programmatic_ast_prints_parseable():
    from ebench.parser import parse_expr_text, parse_pred_text

    m = MachineDefinition(
        name="tiny",
        sees=["c0"],
        variables=[VarDecl("b", parse_expr_text("POSITIONS"))],
        invariants=[("inv1", parse_pred_text("b : POSITIONS"))],
        init=EventDefinition(
            "INITIALISATION",
            actions=[Assign("b", parse_expr_text("DOWN"), "act1")],
        ),
        events=[
            EventDefinition(
                "flip",
                guards=[("grd1", parse_pred_text("b = DOWN"))],
                actions=[Assign("b", parse_expr_text("UP"), "act1")],
            )
        ],
        symbols=CTXS["c0"].symbol_env(CTXS),
    )
    printed = pretty_print(m)
    reparsed = parse_machine(printed, CTXS)
    assert reparsed == m


def test_generated_nodes_roundtrip_through_text():
    """Printer/parser inverse on random well-typed trees, beyond the bundled
    files (catches precedence and parenthesization bugs)."""
    import random

    from genexpr import ExprGen, random_sort

    from ebench.parser import parse_expr_text, parse_pred_text
    from ebench.pretty import expr_text, pred_text

    for i in range(400):
        gen = ExprGen(random.Random(i))
        if i % 2:
            node = gen.pred(3)
            text = pred_text(node)
            assert parse_pred_text(text) == node, text
        else:
            node = gen.expr(random_sort(random.Random(i + 10_000)), 3)
            text = expr_text(node)
            assert parse_expr_text(text) == node, text
