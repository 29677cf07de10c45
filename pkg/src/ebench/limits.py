"""Evaluation and exploration limit knobs."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EvalLimits:
    #: largest extension any single enumeration may produce
    max_enum: int = 2**20
    #: naturals are bounded; exceeding the bound is an evaluation error
    nat_max: int = 2**32 - 1


@dataclass(frozen=True)
class ExploreLimits:
    max_states: int = 1_000_000
    max_depth: int | None = None
    eval: EvalLimits = EvalLimits()


DEFAULT_EVAL_LIMITS = EvalLimits()
DEFAULT_EXPLORE_LIMITS = ExploreLimits()
