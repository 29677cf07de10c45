"""Bundled model catalog: the landing-gear chain, overlays and mutants.

Model sources live in the package's models/ directory and are embedded in
wheels.  Loading goes through the catalog first and falls back to the
filesystem, so users can shadow a bundled model by path.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .errors import IllFormedModel, UnknownModel
from .machine import ContextDefinition, EventDefinition, MachineDefinition, assigned_vars, validate_machine
from .parser import Overlay, parse_context, parse_machine, parse_overlay
from .values import Nat, Value


@dataclass(frozen=True)
class ModelCatalogEntry:
    name: str
    kind: str  # context | machine | overlay
    provenance: str  # verbatim | reconstructed | variant
    source_file: str
    description: str


CATALOG: List[ModelCatalogEntry] = [
    ModelCatalogEntry("c0", "context", "reconstructed", "c0.ebc", "carrier sets of the abstract levels"),
    ModelCatalogEntry("c1", "context", "reconstructed", "c1.ebc", "sensor/cylinder/light carriers, Hin, horizon"),
    ModelCatalogEntry("m1", "machine", "verbatim", "m1.ebm", "handle and motion phase"),
    ModelCatalogEntry("m2r", "machine", "reconstructed", "m2r.ebm", "doors and locks (gear level minus gstate)"),
    ModelCatalogEntry("m3", "machine", "verbatim", "m3.ebm", "doors, locks and gears"),
    ModelCatalogEntry("m7", "machine", "verbatim", "m7.ebm", "sensors, valves, cylinders, failure detection"),
    ModelCatalogEntry("m8t", "machine", "variant", "m8t.ebm", "timed fragment with deadline-jumping clock"),
    ModelCatalogEntry("m9l", "machine", "variant", "m9l.ebm", "failure level plus pilot lights"),
    ModelCatalogEntry("safe_oracle", "overlay", "variant", "safe_oracle.ovl", "safe computing-module outputs"),
    ModelCatalogEntry("m3_bad_guard", "machine", "variant", "m3_bad_guard.ebm", "mutant: closing_doors_UP lost grd7"),
    ModelCatalogEntry("m3_bad_skip", "machine", "variant", "m3_bad_skip.ebm", "mutant: retraction moves phase"),
]

_BY_NAME = {entry.name: entry for entry in CATALOG}

#: order in which contexts must be parsed (extension dependencies)
_CONTEXT_ORDER = ["c0", "c1"]


def list_models() -> List[ModelCatalogEntry]:
    return list(CATALOG)


def _read_source(file_name: str) -> str:
    return resources.files("ebench").joinpath("models", file_name).read_text(encoding="utf-8")


def load_contexts(constant_overrides: Optional[Dict[str, Value]] = None) -> Dict[str, ContextDefinition]:
    contexts: Dict[str, ContextDefinition] = {}
    for name in _CONTEXT_ORDER:
        entry = _BY_NAME[name]
        ctx = parse_context(_read_source(entry.source_file), contexts, file=entry.source_file)
        if constant_overrides:
            for cname, value in constant_overrides.items():
                if cname in ctx.constants:
                    ctx.constants[cname] = value
        contexts[name] = ctx
    return contexts


def load_model(
    name: str, constant_overrides: Optional[Dict[str, Value]] = None
) -> Union[MachineDefinition, ContextDefinition]:
    entry = _BY_NAME.get(name)
    if entry is None:
        raise UnknownModel(f"no bundled model named {name!r} (see `models` subcommand)")
    contexts = load_contexts(constant_overrides)
    if entry.kind == "context":
        return contexts[name]
    if entry.kind == "overlay":
        raise UnknownModel(f"{name!r} is an overlay; pass it via overlays=")
    return parse_machine(_read_source(entry.source_file), contexts, file=entry.source_file)


def load_overlay(name: str) -> Overlay:
    entry = _BY_NAME.get(name)
    if entry is None or entry.kind != "overlay":
        raise UnknownModel(f"no bundled overlay named {name!r}")
    return parse_overlay(_read_source(entry.source_file), file=entry.source_file)


def apply_overlay(machine: MachineDefinition, overlay: Overlay) -> MachineDefinition:
    """Return a copy of `machine` with the overlay's guard additions and
    action replacements applied.  A replacement action supersedes every
    existing action that assigns any of the same variables."""
    import copy

    if overlay.target != machine.name:
        raise IllFormedModel(
            overlay.span or machine.span,
            f"overlay {overlay.name!r} targets {overlay.target!r}, not {machine.name!r}",
        )
    m = copy.deepcopy(machine)
    m.name = f"{machine.name}+{overlay.name}"
    events_by_name = {ev.name: ev for ev in m.events}
    events_by_name["INITIALISATION"] = m.init
    for ev_over in overlay.events:
        ev = events_by_name.get(ev_over.event)
        if ev is None:
            raise IllFormedModel(ev_over.span or overlay.span, f"overlay names unknown event {ev_over.event!r}")
        ev.guards = ev.guards + list(ev_over.extra_guards)
        for repl in ev_over.replacement_actions:
            targets = set(assigned_vars(repl))
            kept = []
            inserted = False
            for act in ev.actions:
                if targets & set(assigned_vars(act)):
                    if not inserted:
                        kept.append(repl)
                        inserted = True
                    continue
                kept.append(act)
            if not inserted:
                kept.append(repl)
            ev.actions = kept
    validate_machine(m)
    return m


def load_machine(
    name_or_path: str,
    overlays: Iterable[str] = (),
    constant_overrides: Optional[Dict[str, int]] = None,
) -> MachineDefinition:
    """Main loading entry point: catalog name first, filesystem path second."""
    consts = {k: Nat(v) for k, v in (constant_overrides or {}).items()}
    if name_or_path in _BY_NAME:
        machine = load_model(name_or_path, consts)
    else:
        path = Path(name_or_path)
        if not path.exists():
            raise UnknownModel(f"{name_or_path!r} is neither a bundled model nor a file")
        machine = parse_machine(path.read_text(encoding="utf-8"), load_contexts(consts), file=str(path))
    if not isinstance(machine, MachineDefinition):
        raise UnknownModel(f"{name_or_path!r} is not a machine")
    for overlay_name in overlays:
        machine = apply_overlay(machine, load_overlay(overlay_name))
    return machine


def load_event_map(abstract: str, concrete: str) -> Optional[Dict[str, Optional[str]]]:
    """Bundled event map for a refinement pair, if one ships."""
    file_name = f"maps/{abstract}_{concrete}.map"
    try:
        text = _read_source(file_name)
    except FileNotFoundError:
        return None
    return parse_event_map(text)


def parse_event_map(text: str) -> Dict[str, Optional[str]]:
    from .errors import SourceSpan

    mapping: Dict[str, Optional[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise IllFormedModel(SourceSpan("<event-map>", lineno, 1), f"bad event-map line: {raw!r}")
        concrete_name, _, abstract_name = (part.strip() for part in line.partition("->"))
        mapping[concrete_name] = None if abstract_name == "skip" else abstract_name
    return mapping
