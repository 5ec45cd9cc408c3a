from __future__ import annotations

import json
import subprocess
import sys


def run_cli(*args, stdin=None):
    return subprocess.run(
        [sys.executable, "-m", "smashlab.cli", *args],
        text=True,
        capture_output=True,
        input=stdin,
    )


def run_json(*args):
    proc = run_cli(*args, "--json")
    assert proc.stdout.strip(), proc.stderr
    return json.loads(proc.stdout), proc.returncode


def test_support_json_schema():
    data, code = run_json("support", "ER(1)")
    assert code == 0
    assert data["group"] == "C2"
    assert data["classes"] == [
        {"subgroup": "e", "value": {"level": 1}},
        {"subgroup": "C2", "value": "bot"},
    ]


def test_support_human_table():
    proc = run_cli("support", "EG(3,1)")
    assert proc.returncode == 0
    assert "group: C8" in proc.stdout
    assert "E(4)" in proc.stdout


def test_equal_exit_codes():
    assert run_cli("equal", "ER(1)", "ind[C(2)](E(1))").returncode == 0
    assert run_cli("equal", "triv[C(2)](E(1))", "triv[C(2)](E(2))").returncode == 1


def test_acyclic_and_leq():
    assert run_cli("acyclic", "EF[triv]@C(2)", "tEF[triv]@C(2)").returncode == 0
    assert run_cli("acyclic", "S0", "S0").returncode == 1
    assert run_cli("leq", "EG(3,1)", "EG(3,2)").returncode == 0
    assert run_cli("leq", "EG(3,2)", "EG(3,1)").returncode == 1


def test_smashing_json_and_exit():
    data, code = run_json("smashing", "ind[C(2)](E(1))")
    assert code == 1
    assert data["status"] == "NotSmashing"
    assert "Cor 3.23" in data["citations"]
    assert data["witness"]["subgroup"] == "C2"
    data, code = run_json("smashing", "ind[C(2)](E(0))")
    assert code == 0
    assert data["status"] == "Smashing"


def test_localize_json():
    data, code = run_json("localize", "ER(2)")
    assert code == 0
    assert data["formula"] == "F(EC2+, i_*L_{E(2)}(S0) ^ X)"


def test_locals_and_fixclass():
    proc = run_cli("locals", "ind[C(4)](tEF[triv]@C(2))")
    assert proc.returncode == 0
    assert "cofree" in proc.stdout
    data, code = run_json("fixclass", "ER(3)")
    assert code == 0
    assert data["value"] == {"level": 3}
    assert data["ring_hypothesis"] is True


def test_ideals_commands():
    data, code = run_json("ideals", "enumerate", "--n", "1", "--max", "2")
    assert code == 0 and data["count"] == 8
    data, code = run_json("ideals", "verify", "1,0")
    assert code == 0 and data["ok"] is True
    data, code = run_json("ideals", "construct", "2,1,1")
    assert code == 0
    assert any(case.startswith("(iii)") for case in data["cases"])
    proc = run_cli("ideals", "verify", "2,0")
    assert proc.returncode == 2  # invalid sequence is a usage-level error


def test_ninfty_commands(tmp_path):
    data, code = run_json(
        "ninfty", "coinduce", "--group", "C(4)", "--sub", "C(2)",
        "--admissible", "complete",
    )
    assert code == 0 and data["complete"] is True
    data, code = run_json(
        "ninfty", "closure", "--expr", "tEF[triv]@C(2)",
        "--admissible", "complete",
    )
    assert code == 1
    assert data["status"] == "NotClosed"
    assert data["counterexample"]["is_acyclic"] is True
    assert data["counterexample"]["norm_is_acyclic"] is False
    system_file = tmp_path / "system.json"
    system_file.write_text(json.dumps([{"H": "(1,2)", "K": "e"}]))
    data, code = run_json(
        "ninfty", "closure", "--expr", "EF[triv]@S(3)",
        "--admissible", str(system_file),
    )
    assert code == 0 and data["status"] == "Closed"
    data, code = run_json(
        "ninfty", "propagate", "--expr", "EG(2,1)", "--admissible", "trivial",
    )
    assert code == 0 and data["complete"] is True


def test_selftest_runs_quickly_and_passes():
    import time

    start = time.monotonic()
    proc = run_cli("selftest")
    elapsed = time.monotonic() - start
    assert proc.returncode == 0
    assert "selftest: pass" in proc.stdout
    assert proc.stdout.count("ok  ") == 9
    assert elapsed < 10  # subprocess startup dominates; the math is < 1 s


def test_error_exit_codes():
    proc = run_cli("support", "norm[C(4)](E(1)")
    assert proc.returncode == 2
    assert "error:" in proc.stderr
    proc = run_cli("equal", "S0@C(2)", "S0@C(4)")
    assert proc.returncode == 2


def test_defs_file_and_stdin(tmp_path):
    defs = tmp_path / "defs.txt"
    defs.write_text("let borel = EF[triv]@C(2);\n")
    proc = run_cli("acyclic", "borel", "tEF[triv]@C(2)", "--defs", str(defs))
    assert proc.returncode == 0
    proc = run_cli("support", "-", stdin="ER(1)\n")
    assert proc.returncode == 0
    assert "E(1)" in proc.stdout


def test_prime_flag():
    # at an odd session prime the order-2 Tate entries vanish
    data, code = run_json("smashing", "ind[C(2)](E(1))", "--prime", "3")
    assert code == 0 and data["status"] == "Smashing"
    proc = run_cli("support", "EG(2,1)", "--prime", "3")
    assert proc.returncode == 2  # refused away from the prime 2


def test_determinism_byte_identical():
    for args in (
        ["support", "ind[S(4)](tEF[triv]@C(2))", "--json"],
        ["ideals", "enumerate", "--n", "2", "--max", "2", "--json"],
        ["ninfty", "coinduce", "--group", "S(3)", "--sub", "C(2)",
         "--admissible", "complete", "--json"],
        ["selftest"],
    ):
        first = run_cli(*args)
        second = run_cli(*args)
        assert first.stdout == second.stdout
        assert first.returncode == second.returncode
