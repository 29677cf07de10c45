"""Exploration engine selection: compiled core if built, pure Python otherwise.

Set EBENCH_PURE=1 to force the pure engine (used by the benchmark and the
parity tests).
"""

from __future__ import annotations

import os

from .pure import RunOptions, RunResult
from .pure import run as _pure_run

if os.environ.get("EBENCH_PURE"):
    run = _pure_run
    ENGINE_NAME = "pure (forced)"
else:
    try:
        from ._core import run  # type: ignore[attr-defined]

        ENGINE_NAME = "compiled"
    except ImportError:
        run = _pure_run
        ENGINE_NAME = "pure"

pure_run = _pure_run

__all__ = ["run", "pure_run", "RunOptions", "RunResult", "ENGINE_NAME"]
