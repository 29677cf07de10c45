"""CLI behavior: subcommands, exit codes, deterministic machine output."""

import io
import json
import subprocess
import sys

import pytest

from ebench.cli import main


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_check_m1_pass():
    code, text = run_cli("check", "m1")
    assert code == 0
    assert "4 states, 6 transitions" in text
    assert "overall: pass" in text


def test_check_every_verbatim_model_exits_zero():
    for model in ("m1", "m3"):  # m7 is verbatim too but runs in acceptance at full budget
        code, _ = run_cli("check", model, "--max-states", "200000")
        assert code == 0, model


def test_check_mutant_fails_with_trace():
    code, text = run_cli("check", "m3_bad_guard")
    assert code == 1
    assert "M3_inv6" in text
    assert "closing_doors_UP" in text


def test_usage_error_exit_2():
    assert main(["check", "nosuchmodel"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["bogus-subcommand"])
    assert exc.value.code == 2


def test_parse_subcommand(tmp_path):
    good = tmp_path / "ok.ebm"
    good.write_text(
        "machine ok sees c0\nvariables\n  x : BOOL\ninit\n  then\n    act1: x := TRUE\n  end\n"
        "event spin\n  then\n    act1: x := TRUE\n  end\nend\n"
    )
    code, text = run_cli("parse", str(good))
    assert code == 0 and "ok" in text
    code, text = run_cli("parse", str(good), "--pretty")
    assert code == 0 and text.startswith("machine ok sees c0")

    bad = tmp_path / "bad.ebm"
    bad.write_text("machine bad sees c0\nvariables\n  x :\n")
    assert main(["parse", str(bad)]) == 2


def test_models_subcommand():
    code, text = run_cli("models")
    assert code == 0
    assert "m3_bad_guard" in text and "verbatim" in text


def test_graph_dot(tmp_path):
    out_file = tmp_path / "m1.dot"
    code, text = run_cli("graph", "m1", "--dot", str(out_file), "--vars", "button,phase")
    assert code == 0
    dot = out_file.read_text()
    assert dot.count("->") == 6 and "PressUP" in dot
    # deterministic golden: byte-identical on a second run
    out2 = tmp_path / "m1b.dot"
    run_cli("graph", "m1", "--dot", str(out2), "--vars", "button,phase")
    assert out2.read_text() == dot


def test_reqs_only_r21():
    code, text = run_cli("reqs", "--only", "R21", "--max-states", "100000")
    assert code == 0
    assert "R21: pass" in text


def test_reqs_adversarial():
    code, text = run_cli("reqs", "--only", "R41,R51", "--adversarial", "--max-states", "100000")
    assert code == 0
    assert "counterexample" in text


def test_refine_cli():
    code, text = run_cli("refine", "m2r", "m3")
    assert code == 0
    assert "refinement: pass" in text and "relative-deadlock: pass" in text
    code, text = run_cli("refine", "m2r", "m3_bad_skip")
    assert code == 1


def test_json_reports_are_byte_deterministic():
    code1, a = run_cli("check", "m3", "--json")
    code2, b = run_cli("check", "m3", "--json")
    assert code1 == code2 == 0
    assert a == b
    payload = json.loads(a)
    assert payload["schema"] == "ebench-report/1"
    assert payload["verdict"] == "pass"
    names = [r["check"] for r in payload["results"]]
    assert names == ["invariants", "deadlock", "feasibility"]
    assert all("wall_time" not in r for r in payload["results"])


def test_json_violation_trace_schema():
    code, text = run_cli("check", "m3_bad_guard", "--json")
    assert code == 1
    payload = json.loads(text)
    inv_result = payload["results"][0]
    assert inv_result["verdict"] == "fail"
    violation = inv_result["violations"][0]
    assert violation["kind"] == "invariant"
    assert violation["trace"]["steps"][-1]["event"] == "closing_doors_UP"
    state = violation["trace"]["steps"][-1]["state"]
    assert state[0]["name"] == "dstate"


def test_console_script_entrypoint():
    proc = subprocess.run(
        [sys.executable, "-m", "ebench.cli", "models"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "m1" in proc.stdout


def test_golden_json_report():
    """Schema drift guard: byte-compare against the checked-in golden."""
    from pathlib import Path

    golden = Path(__file__).parent / "golden" / "check_m1.json"
    code, text = run_cli("check", "m1", "--json")
    assert code == 0
    assert text == golden.read_text()


def test_golden_dot_export():
    from pathlib import Path

    golden = Path(__file__).parent / "golden" / "m1.dot"
    code, text = run_cli("graph", "m1", "--dot", "-", "--vars", "button,phase")
    assert code == 0
    assert text == golden.read_text()
