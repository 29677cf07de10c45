"""Command-line interface.

Subcommands: check (invariants + deadlock + feasibility), refine, reqs,
graph (DOT export), animate (HTTP service), parse (lint/pretty), models.

Exit codes: 0 all requested checks pass, 1 a check failed, 2 usage or
parse error.  `--json` emits the machine-readable report (stable schema,
byte-deterministic for fixed inputs and limits; see docs/report-schema.md).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .catalog import list_models, load_event_map, load_machine, parse_event_map
from .errors import EbenchError, ModelError, TruncatedSystem
from .explore import CheckReport, Trace, check_all, reachable, to_dot
from .limits import ExploreLimits
from .machine import binding_text
from .values import canonical_text

SCHEMA = "ebench-report/1"


def _limits(args) -> ExploreLimits:
    return ExploreLimits(max_states=args.max_states, max_depth=getattr(args, "max_depth", None))


def _overrides(args) -> Optional[Dict[str, int]]:
    if getattr(args, "horizon", None) is not None:
        return {"horizon": args.horizon}
    return None


def _trace_json(trace: Optional[Trace]) -> Optional[dict]:
    if trace is None:
        return None

    def state_obj(state):
        return [{"name": n, "value": canonical_text(v)} for n, v in zip(state.names, state.values)]

    return {
        "initial": state_obj(trace.initial),
        "steps": [
            {
                "event": s.event,
                "bindings": {n: canonical_text(v) for n, v in sorted(s.bindings.items())},
                "state": state_obj(s.state),
            }
            for s in trace.steps
        ],
    }


def _report_json(name: str, report: CheckReport) -> dict:
    return {
        "check": name,
        "verdict": report.verdict,
        "states": report.stats.states,
        "transitions": report.stats.transitions,
        "truncated": report.stats.truncated,
        "truncation_reason": report.stats.truncation_reason,
        "violations": [
            {
                "kind": v.kind,
                "label": v.label,
                "message": v.message,
                "trace": _trace_json(v.trace),
            }
            for v in report.violations
        ],
        "warnings": sorted(set(report.warnings)),
    }


def _print_report(name: str, report: CheckReport, out) -> None:
    stats = report.stats
    extra = " (truncated: %s)" % stats.truncation_reason if stats.truncated else ""
    print(
        f"{name}: {report.verdict} [{stats.states} states, {stats.transitions} transitions, "
        f"{stats.wall_time:.2f}s]{extra}",
        file=out,
    )
    seen_traces = set()
    for v in report.violations:
        print(f"  {v.kind} {v.label}: {v.message}", file=out)
        if v.trace is not None and id(v.trace) not in seen_traces:
            seen_traces.add(id(v.trace))
            print(v.trace.pretty(), file=out)
    for w in sorted(set(report.warnings)):
        print(f"  warning: {w}", file=out)


def _emit(args, payload: dict, reports: List[tuple], out) -> int:
    ok = all(r.verdict == "pass" for _, r in reports)
    if args.json:
        payload["results"] = [_report_json(n, r) for n, r in reports]
        payload["verdict"] = "pass" if ok else "fail"
        payload["schema"] = SCHEMA
        print(json.dumps(payload, indent=2, sort_keys=True), file=out)
    else:
        for n, r in reports:
            _print_report(n, r, out)
        print("overall: " + ("pass" if ok else "FAIL"), file=out)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args, out) -> int:
    machine = load_machine(args.model, overlays=args.overlay, constant_overrides=_overrides(args))
    reports = check_all(machine, _limits(args))
    return _emit(args, {"command": "check", "model": args.model}, reports, out)


def cmd_refine(args, out) -> int:
    from .refine import RefinementSpec, check_convergence, check_refinement, check_relative_deadlock

    abstract = load_machine(args.abstract)
    concrete = load_machine(args.concrete, overlays=args.overlay)
    mapping = None
    if args.map:
        mapping = parse_event_map(Path(args.map).read_text(encoding="utf-8"))
    else:
        mapping = load_event_map(args.abstract, args.concrete)
    spec = RefinementSpec(abstract, concrete, event_map=mapping or {})
    limits = _limits(args)
    reports = [
        ("refinement", check_refinement(spec, limits)),
        ("relative-deadlock", check_relative_deadlock(spec, limits)),
    ]
    if args.convergence:
        reports.append(("convergence", check_convergence(spec, limits)))
    return _emit(
        args, {"command": "refine", "abstract": args.abstract, "concrete": args.concrete}, reports, out
    )


def cmd_reqs(args, out) -> int:
    from .props import builtin_requirements, parse_requirements, run_requirement

    if args.catalog:
        catalog = parse_requirements(Path(args.catalog).read_text(encoding="utf-8"), args.catalog)
    else:
        catalog = builtin_requirements()
    names = list(catalog)
    if args.only:
        wanted = [n.strip() for n in args.only.split(",") if n.strip()]
        unknown = [n for n in wanted if n not in catalog]
        if unknown:
            raise EbenchError(f"unknown requirement(s): {unknown}; catalog has {names}")
        names = wanted
    limits = _limits(args)
    reports = []
    for name in names:
        req = catalog[name]
        if args.overlay:
            extra = tuple(o for o in args.overlay if o not in req.overlays)
            req = type(req)(req.name, req.model, req.prop, req.overlays + extra, req.adversarial, req.text)
        if args.adversarial:
            if not req.adversarial:
                continue
            report = run_requirement(req, limits, adversarial=True)
        else:
            report = run_requirement(req, limits, allow_truncated=args.allow_truncated)
        reports.append((name, report))
    if not reports:
        raise EbenchError("no requirements selected")
    return _emit(args, {"command": "reqs", "adversarial": args.adversarial}, reports, out)


def cmd_graph(args, out) -> int:
    machine = load_machine(args.model, overlays=args.overlay, constant_overrides=_overrides(args))
    ts = reachable(machine, _limits(args))
    show = [v.strip() for v in args.vars.split(",")] if args.vars else None
    dot = to_dot(ts, show)
    if args.dot == "-":
        out.write(dot)
    else:
        Path(args.dot).write_text(dot, encoding="utf-8")
        print(
            f"wrote {args.dot}: {ts.n_states} states, {ts.n_transitions} transitions"
            + (" (truncated)" if ts.truncated else ""),
            file=out,
        )
    return 0


def cmd_parse(args, out) -> int:
    from .catalog import load_contexts
    from .parser import parse_context, parse_machine
    from .pretty import pretty_print

    path = Path(args.file)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".ebc":
        definition = parse_context(text, load_contexts(), file=str(path))
    else:
        definition = parse_machine(text, load_contexts(), file=str(path))
    if args.pretty:
        out.write(pretty_print(definition))
    else:
        kind = "context" if path.suffix == ".ebc" else "machine"
        print(f"ok: {kind} {definition.name} ({path})", file=out)
    return 0


def cmd_models(args, out) -> int:
    entries = list_models()
    if args.json:
        payload = {
            "schema": SCHEMA,
            "command": "models",
            "models": [
                {
                    "name": e.name,
                    "kind": e.kind,
                    "provenance": e.provenance,
                    "source": e.source_file,
                    "description": e.description,
                }
                for e in entries
            ],
        }
        print(json.dumps(payload, indent=2, sort_keys=True), file=out)
        return 0
    width = max(len(e.name) for e in entries)
    for e in entries:
        print(f"{e.name:<{width}}  {e.kind:<8} {e.provenance:<13} {e.description}", file=out)
    return 0


def cmd_animate(args, out) -> int:
    from .service import serve

    print(f"animator listening on http://{args.host}:{args.port} (UI at /ui)", file=out)
    serve(host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ebench", description=__doc__)
    ap.add_argument("--version", action="version", version=f"ebench {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, model_arg=True):
        if model_arg:
            p.add_argument("model", help="bundled model name or path to a .ebm file")
        p.add_argument("--max-states", type=int, default=1_000_000)
        p.add_argument("--max-depth", type=int, default=None)
        p.add_argument("--horizon", type=int, default=None, help="override the timed-fragment horizon")
        p.add_argument("--overlay", action="append", default=[], help="apply a bundled overlay")
        p.add_argument("--json", action="store_true", help="machine-readable report")

    p = sub.add_parser("check", help="invariants + deadlock freedom + feasibility")
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("refine", help="refinement + relative deadlock freedom")
    p.add_argument("abstract")
    p.add_argument("concrete")
    p.add_argument("--map", help="event map file (concrete -> abstract|skip)")
    p.add_argument("--convergence", action="store_true", help="also check skip-event convergence")
    p.add_argument("--max-states", type=int, default=200_000)
    p.add_argument("--overlay", action="append", default=[])
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_refine)

    p = sub.add_parser("reqs", help="run the requirement catalog")
    p.add_argument("--only", help="comma-separated requirement names")
    p.add_argument("--catalog", help="alternative catalog file")
    p.add_argument("--adversarial", action="store_true",
                   help="drop overlays; finding a counterexample is the pass condition")
    p.add_argument("--allow-truncated", action="store_true", default=True,
                   help="bounded verdicts for state spaces beyond --max-states (default)")
    p.add_argument("--strict-complete", dest="allow_truncated", action="store_false",
                   help="fail instead of giving bounded verdicts")
    p.add_argument("--max-states", type=int, default=400_000)
    p.add_argument("--overlay", action="append", default=[])
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_reqs)

    p = sub.add_parser("graph", help="export the reachable graph as DOT")
    common(p)
    p.add_argument("--dot", required=True, help="output file ('-' for stdout)")
    p.add_argument("--vars", help="comma-separated variables to show in node labels")
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("parse", help="parse a model file; print errors with positions")
    p.add_argument("file")
    p.add_argument("--pretty", action="store_true", help="print the canonical formatting")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("models", help="list the bundled model catalog")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_models)

    p = sub.add_parser("animate", help="serve the interactive animator")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8990)
    p.set_defaults(fn=cmd_animate)

    return ap


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args, out)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TruncatedSystem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
