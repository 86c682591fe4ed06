import json
import shutil
import subprocess
import sys

import pytest

from holonomy_forge import cli
from holonomy_forge.resources import ENV_VAR, asset_dir, read_asset
from holonomy_forge.spin7 import ALPHA_MATRIX


def spec_text(dim, structure, blocks):
    lines = [f"dim {dim}", f"structure {structure}"]
    for label, rows, trans in blocks:
        lines.append(f"generator {label}")
        lines += [" ".join(map(str, r)) for r in rows]
        lines.append(" ".join(map(str, trans)))
    return "\n".join(lines) + "\n"


def test_parse_bundled_spec(t7_spec):
    assert t7_spec.dim == 7 and t7_spec.structure == "g2"
    assert [g.label for g in t7_spec.generators] == ["alpha", "beta", "gamma"]


def test_empty_generator_list_is_trivial():
    spec = cli.parse_orbifold_spec("dim 7\nstructure g2\n")
    assert spec.generators == ()


def test_parse_error_positions():
    with pytest.raises(cli.ParseError) as exc:
        cli.parse_orbifold_spec("dim 2\nstructure g2\n")
    assert exc.value.line == 1
    bad_entry = "dim 7\nstructure g2\n" + "1 0 0 0 0 0 x\n" + "0 0 0 0 0 0 0\n" * 7
    with pytest.raises(cli.ParseError) as exc:
        cli.parse_orbifold_spec(bad_entry)
    assert (exc.value.line, exc.value.column) == (3, 13)
    with pytest.raises(cli.ParseError) as exc:
        cli.parse_orbifold_spec("dim 7\nstructure g2\n1 0 0 0 0 0 0\n")
    assert exc.value.line == 3


def test_non_orthogonal_generator_is_named():
    rows = [[int(i == j) for j in range(7)] for i in range(7)]
    rows[0][1] = 1
    with pytest.raises(cli.ValidationError) as exc:
        cli.parse_orbifold_spec(spec_text(7, "g2", [("delta", rows, [0] * 7)]))
    assert exc.value.generator == "delta"


def test_findings_and_exit_codes(capsys):
    assert cli.main(["orbifold-analyze"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "singular set: 12 components, T^3, model C^2/{±1}" in out
    assert cli.main(["orbifold-betti"]) == cli.EXIT_OK
    assert "(b2, b3) of the resolution: (12, 43)" in capsys.readouterr().out
    assert cli.main(["estimates-check"]) == cli.EXIT_OK
    assert "hypotheses: 5/5 pass; induction closes, min margin t^{1/2}" in capsys.readouterr().out
    assert cli.main(["verify-structures"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "[FAIL]" not in out


def test_every_finding_is_cited(tmp_path):
    path = tmp_path / "r.json"
    assert cli.main(["report", "--json", str(path)]) == cli.EXIT_OK
    doc = json.loads(path.read_text())
    assert doc["schema"] == 1 and doc["exit_code"] == 0
    assert "timing_ms" not in doc
    assert all(f["citation"] for f in doc["findings"])
    assert {f["status"] for f in doc["findings"]} <= {"pass", "fail", "info"}


def test_json_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli.main(["--json", str(a), "orbifold-betti"])
    cli.main(["--json", str(b), "orbifold-betti"])
    assert a.read_bytes() == b.read_bytes()
    cli.main(["--json", str(a), "--include-timing", "estimates-check"])
    assert "timing_ms" in json.loads(a.read_text())


def test_failed_finding_exit_code(tmp_path):
    f = tmp_path / "est.txt"
    f.write_text(read_asset("estimates_default").replace("t^-4 * dEta_L2'", "t^-5 * dEta_L2'"))
    assert cli.main(["estimates-check", str(f)]) == cli.EXIT_FAILED


def test_input_error_exit_code(tmp_path, capsys):
    assert cli.main(["orbifold-betti", str(tmp_path / "missing.orb")]) == cli.EXIT_INPUT
    bad = tmp_path / "bad.orb"
    bad.write_text("dim 7\nstructure g3\n")
    assert cli.main(["orbifold-analyze", str(bad)]) == cli.EXIT_INPUT
    assert "line 2" in capsys.readouterr().err


def test_unsupported_model_exit_code(tmp_path):
    f = tmp_path / "z4.orb"
    f.write_text(spec_text(8, "spin7", [("alpha", ALPHA_MATRIX, [0] * 8)]))
    assert cli.main(["orbifold-betti", str(f)]) == cli.EXIT_UNSUPPORTED


def test_asset_override(tmp_path, monkeypatch):
    shutil.copytree(asset_dir(), tmp_path / "assets")
    est = tmp_path / "assets" / "estimates_default"
    est.write_text(est.read_text().replace("t^-4 * dEta_L2'", "t^-5 * dEta_L2'"))
    monkeypatch.setenv(ENV_VAR, str(tmp_path / "assets"))
    assert cli.main(["estimates-check"]) == cli.EXIT_FAILED
    monkeypatch.setenv(ENV_VAR, str(tmp_path / "nowhere"))
    assert cli.main(["estimates-check"]) == cli.EXIT_INPUT


def test_digest_tracks_input_content(tmp_path):
    a = cli.execute(cli.build_parser().parse_args(["estimates-check"]))
    f = tmp_path / "est.txt"
    f.write_text(read_asset("estimates_default") + "\n# trailing comment\n")
    b = cli.execute(cli.build_parser().parse_args(["estimates-check", str(f)]))
    assert a.inputs_digest != b.inputs_digest
    again = cli.execute(cli.build_parser().parse_args(["estimates-check"]))
    assert a.inputs_digest == again.inputs_digest


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "holonomy_forge.cli", "estimates-check"], capture_output=True, text=True)
    assert proc.returncode == 0 and "estimates-check: all findings pass" in proc.stdout
