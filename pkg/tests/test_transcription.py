"""Transcription pins for the verbatim models: each event's guard and action
label inventory must match the original listings exactly (catches silent
edits to the bundled files; the label numbering gaps are original too)."""

import pytest

from ebench.catalog import load_model
from ebench.machine import assigned_vars

# m3: event -> (guard labels, action labels); 24 events, listing order
M3_EVENTS = {
    "opening_doors_DOWN": (["grd1", "grd5", "grd7", "grd8", "grd9"], ["act1", "act2"]),
    "opening_doors_UP": (["grd1", "grd4", "grd5", "grd6", "grd7"], ["act1", "act2"]),
    "closing_doors_UP": (["grd1", "grd3", "grd4", "grd5", "grd6", "grd7"], ["act1"]),
    "closing_doors_DOWN": (["grd1", "grd3", "grd4", "grd5", "grd6", "grd7"], ["act1"]),
    "unlocking_UP": (["grd3", "grd4", "grd5", "grd6", "grd7"], ["act1"]),
    "locking_UP": (["grd3", "grd4", "grd5", "grd6", "grd7"], ["act1", "act3", "act4"]),
    "unlocking_DOWN": (["grd3", "grd4", "grd5", "grd6", "grd7"], ["act1"]),
    "locking_DOWN": (["grd1", "grd2", "grd3", "grd4", "grd5"], ["act1", "act3", "act4"]),
    "PD1": (["grd1", "grd2"], ["act1", "act2", "act3", "act4", "act5"]),
    "PU1": (["grd1", "grd2"], ["act1", "act2", "act3", "act4", "act5"]),
    "PU2": (["grd1", "grd2", "grd3", "grd4", "grd5", "grd6"], ["act1", "act4", "act5", "act6", "act7"]),
    "CompletePU2": (["grd1", "grd2", "grd3", "grd4", "grd5"], ["act1"]),
    "PU3": (["grd1", "grd2", "grd3", "grd4", "grd5", "grd6"], ["act1", "act2", "act3", "act4"]),
    "PU4": (["grd1", "grd2", "grd3", "grd4"], ["act1", "act2", "act3", "act4", "act5"]),
    "PU5": (["grd1", "grd2", "grd3", "grd4", "grd5"], ["act1", "act3", "act4", "act5"]),
    "PD2": (["grd1", "grd2", "grd3", "grd4", "grd5"], ["act1", "act2", "act3", "act4", "act5"]),
    "CompletePD2": (["grd1", "grd2", "grd3", "grd4", "grd5"], ["act1"]),
    "PD3": (["grd1", "grd2", "grd3", "grd4", "grd5", "grd6"], ["act1", "act2", "act3", "act4"]),
    "PD4": (["grd1", "grd2", "grd3", "grd4"], ["act1", "act2", "act3", "act4", "act5"]),
    "PD5": (["grd1", "grd2", "grd3", "grd4", "grd5"], ["act1", "act2", "act3", "act4"]),
    "retracting_gears": (["grd1", "grd2", "grd3"], ["act1"]),
    "retraction": (["grd1", "grd2"], ["act1"]),
    "extending_gears": (["grd1", "grd2", "grd3"], ["act1"]),
    "extension": (["grd1", "grd2"], ["act1"]),
}

# m7 spot pins, including the out-of-order guard numbers of the listing
M7_EVENTS = {
    "opening_doors_DOWN": (
        ["grd1", "grd5", "grd7", "grd8", "grd9", "grd10", "grd11", "grd12", "grd3", "grd13"],
        ["act1", "act2", "act3"],
    ),
    "locking_UP": (
        ["grd3", "grd4", "grd5", "grd6", "grd7", "grd9", "grd10", "grd11", "grd8", "grd12"],
        ["act1", "act3", "act4", "act44"],
    ),
    "PU2": (
        ["grd1", "grd2", "grd3", "grd4", "grd5", "grd6", "grd7", "grd8", "grd9"],
        ["act1", "act4", "act5", "act6", "act7"],
    ),
    "retracting_gears": (
        ["grd1", "grd2", "grd3", "grd6", "grd7", "grd8", "grd9", "grd5"],
        ["act1", "act2", "act3"],
    ),
    "extension": (
        ["grd1", "grd2", "grd4", "grd5", "grd6", "grd7", "grd3"],
        ["act1", "act2", "act3"],
    ),
    "Update_Hout": (["grd1"], ["act1", "act2", "act3", "act4", "act5", "act6"]),
    "CylinderMovingOrStop": (["grd1"], ["act1", "act2", "act3"]),
    "Computing_Module_1_2": (
        ["grd1"],
        ["act1", "act2", "act3", "act4", "act5", "act6", "act7", "act8", "act9"],
    ),
    "HPD1": (["grd3"], ["act2"]),
    "Failure_Detection_Doors": (["grd1"], ["act1"]),
}

# m7 initialisation action labels (listing order; act31..act38 are the
# erased computing functions, act26 really does come last)
M7_INIT_ACTS = [
    "act1", "act2", "act3", "act4", "act5", "act6", "act7", "act8",
    "act14", "act15", "act16", "act17", "act18", "act19", "act20", "act21",
    "act22", "act23", "act24", "act25", "act27", "act28", "act29", "act30",
    "act39", "act40", "act41", "act42", "act43", "act44", "act45", "act46",
    "act26",
]


def _inventory(machine, name):
    ev = machine.event(name)
    return [label for label, _ in ev.guards], [a.label for a in ev.actions]


def test_m3_event_inventory():
    m3 = load_model("m3")
    assert m3.event_names() == list(M3_EVENTS)
    for name, (guards, actions) in M3_EVENTS.items():
        assert _inventory(m3, name) == (guards, actions), name


def test_m7_spot_inventories():
    m7 = load_model("m7")
    for name, (guards, actions) in M7_EVENTS.items():
        assert _inventory(m7, name) == (guards, actions), name


def test_m7_init_action_labels():
    m7 = load_model("m7")
    assert [a.label for a in m7.init.actions] == M7_INIT_ACTS


def test_m3_init_assigns_each_variable_once():
    m3 = load_model("m3")
    assigned = [v for act in m3.init.actions for v in assigned_vars(act)]
    assert sorted(assigned) == sorted(m3.variable_names())


def test_m1_event_inventory():
    m1 = load_model("m1")
    assert m1.event_names() == ["PressDOWN", "PressUP", "movingup", "movingdown"]
    for name in m1.event_names():
        guards, actions = _inventory(m1, name)
        assert guards == ["grd1"]
        assert actions == (["act1", "act2"] if name.startswith("Press") else ["act1"])
