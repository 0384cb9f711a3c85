"""
End-to-end checks of the command-line surface
"""
import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]


def run(*args: str, module: bool = False) -> subprocess.CompletedProcess:
    entry = ["-m", "src"] if module else [str(ROOT / "main.py")]
    return subprocess.run(
        [sys.executable, *entry, *args],
        cwd=ROOT, capture_output=True, text=True,
    )


def table(stdout: str):
    lines = stdout.splitlines()
    assert lines[0].startswith("# schema: dapkit.")
    return list(csv.reader(io.StringIO("\n".join(lines[1:]))))


def diagnostic(stderr: str) -> dict:
    return json.loads(stderr.strip().splitlines()[-1])


def test_unknown_subcommand_prints_usage():
    result = run("frobnicate")
    assert result.returncode == 2
    assert "usage:" in result.stderr
    assert diagnostic(result.stderr)["error"] == "usage"


def test_missing_subcommand():
    result = run()
    assert result.returncode == 2
    assert diagnostic(result.stderr)["exit_code"] == 2


def test_shells_csv():
    result = run("shells", "--host", "3C-SiC", "--relation", "opposite-sublattice", "--shells", "5")
    assert result.returncode == 0, result.stderr
    rows = table(result.stdout)
    assert rows[0] == ["m", "R_angstrom", "multiplicity", "relation", "m_prime", "sublattice"]
    assert len(rows) == 6
    assert rows[1][0] == "1" and rows[1][2] == "4"
    # bond length a0·√3/4 with a0 = 4.362 Å
    assert float(rows[1][1]) == pytest.approx(math.sqrt(3.0) / 4.0 * 4.362, abs=1e-6)


def test_shells_relation_from_pair():
    result = run("shells", "--host", "3C-SiC", "--donor", "N_C", "--acceptor", "B_C", "--shells", "3")
    assert result.returncode == 0, result.stderr
    assert {row[3] for row in table(result.stdout)[1:]} == {"same-sublattice"}


def test_module_entry_point():
    result = run("shells", "--shells", "2", module=True)
    assert result.returncode == 0, result.stderr
    assert result.stdout.startswith("# schema: dapkit.shells/1")


def test_zpl_series_is_deterministic():
    args = ("zpl-series", "--host", "3C-SiC", "--donor", "N_C", "--acceptor", "Al_Si", "--shells", "8")
    first, second = run(*args), run(*args)
    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout
    rows = table(first.stdout)
    assert rows[0] == ["m", "R_angstrom", "zpl_eV"]
    assert float(rows[3][2]) == pytest.approx(2.2117, abs=1e-4)


def test_zpl_fit_round_trip(tmp_path):
    series = run("--out", str(tmp_path / "series.csv"), "zpl-series", "--host", "3C-SiC",
                 "--donor", "N_C", "--acceptor", "Al_Si", "--shells", "10")
    assert series.returncode == 0, series.stderr
    result = run("zpl-fit", "--input", str(tmp_path / "series.csv"), "--host", "3C-SiC")
    assert result.returncode == 0, result.stderr
    document = json.loads(result.stdout)
    assert document["schema"] == "dapkit.zpl-fit/1"
    assert document["result"]["binding_sum"] == pytest.approx(0.35, abs=1e-6)
    assert "manifest" not in document


def test_out_writes_manifest_sidecar(tmp_path):
    out = tmp_path / "shells.csv"
    result = run("--out", str(out), "shells", "--host", "diamond", "--shells", "4")
    assert result.returncode == 0, result.stderr
    assert result.stdout == ""
    assert out.read_text().startswith("# schema: dapkit.shells/1")
    manifest = json.loads(Path(f"{out}.manifest.json").read_text())
    assert manifest["subcommand"] == "shells"
    assert manifest["parameters"]["host"] == "diamond"
    assert "data/materials.example" in manifest["input_digests"]
    assert manifest["run_id"].startswith("run-")


def test_json_output_with_manifest(tmp_path):
    out = tmp_path / "lifetime.json"
    result = run("--format", "json", "--out", str(out),
                 "lifetime", "--energy-eV", "3.8", "--mu-eA", "1", "--nr", "2.4")
    assert result.returncode == 0, result.stderr
    document = json.loads(out.read_text())
    assert document["result"]["tau_ns"] == pytest.approx(2.0, rel=0.02)
    assert document["manifest"]["parameters"]["convention"] is None


def test_dipole_json():
    result = run("dipole", "--ground", "data/ground.example.snap", "--excited", "data/excited.example.snap")
    assert result.returncode == 0, result.stderr
    dipole = json.loads(result.stdout)["result"]
    assert dipole["magnitude_eA"] == pytest.approx(3.8609, abs=1e-4)
    assert dipole["branch_shift"] == [-1, 0, 0]
    assert dipole["ambiguity_flag"] is False


def test_stark_fit_json():
    result = run("stark-fit", "--input", "data/stark.example.csv")
    assert result.returncode == 0, result.stderr
    fit = json.loads(result.stdout)["result"]
    assert fit["delta_mu"] == pytest.approx(2.6575, rel=1e-6)
    assert fit["E_max_V_per_A"] == pytest.approx(0.01)


def test_interaction_map_csv():
    result = run("interaction-map")
    assert result.returncode == 0, result.stderr
    rows = table(result.stdout)
    assert rows[0] == ["r_nm", "V_Hz", "spin_spin_Hz"]
    assert len(rows) == 62


def test_pl_spectrum_summary():
    result = run("--format", "json", "pl-spectrum", "--case", "aln-sic", "--composite")
    assert result.returncode == 0, result.stderr
    summary = json.loads(result.stdout)["result"]
    assert summary["case"] == "aln-sic"
    assert [m["m"] for m in summary["models"]] == [6, 7, 8]
    assert summary["zpl_weight"] > 0.7


def test_ctl_table():
    result = run("ctl", "--records", "data/records-sic.example.csv",
                 "--chempots", "data/chempots.example", "--host", "3C-SiC")
    assert result.returncode == 0, result.stderr
    rows = table(result.stdout)
    assert rows[0][:4] == ["defect", "q1", "q2", "level_eV"]
    references = {row[0]: row[4] for row in rows[1:]}
    assert references == {"Al_Si": "E_V + 0.19", "B_C": "E_V + 0.57", "N_C": "E_C - 0.16"}


def test_reproduce_fig1b():
    result = run("reproduce", "fig1b")
    assert result.returncode == 0, result.stderr
    rows = table(result.stdout)
    assert rows[0] == ["r_nm", "V_15eA_Hz", "V_5eA_Hz", "spin_spin_Hz"]
    assert float(rows[1][0]) == pytest.approx(1.0)
    assert float(rows[-1][0]) == pytest.approx(1000.0)


def test_reproduce_fig5():
    result = run("reproduce", "fig5", "--case", "aln-sic")
    assert result.returncode == 0, result.stderr
    rows = table(result.stdout)
    assert rows[0] == ["energy_eV", "intensity_per_eV", "intensity_m6", "intensity_m7", "intensity_m8"]


def test_reproduce_table1():
    result = run("reproduce", "table1")
    assert result.returncode == 0, result.stderr
    rows = table(result.stdout)
    assert rows[0][0] == "host"
    assert len(rows) == 7


def test_reproduce_case_rules():
    assert run("reproduce", "fig5").returncode == 2
    assert run("reproduce", "fig2", "--case", "aln-sic").returncode == 2


@pytest.mark.parametrize(
    "args, code",
    [
        (("shells", "--host", "GaN"), 10),
        (("zpl-fit", "--input", "missing.csv"), 4),
        (("zpl-series", "--host", "3C-SiC", "--donor", "B_C", "--acceptor", "Al_Si"), 5),
        (("shells", "--host", "3C-SiC", "--rmax", "1um"), 6),
        (("--threads", "0", "shells"), 2),
        (("shells", "--rmax", "12", "--shells", "3"), 2),
        (("pl-spectrum", "--case", "nonexistent"), 10),
    ],
)
def test_exit_codes(args, code):
    result = run(*args)
    assert result.returncode == code, result.stderr
    assert diagnostic(result.stderr)["exit_code"] == code


def test_config_error(tmp_path):
    broken = tmp_path / "broken.toml"
    broken.write_text("[host.x]\nE_g = \n")
    result = run("--config", str(broken), "shells", "--host", "x")
    assert result.returncode == 3
    assert "line" in diagnostic(result.stderr)["detail"]


def test_fit_error(tmp_path):
    series = tmp_path / "one.csv"
    series.write_text("m,R_angstrom,zpl_eV\n1,4.75,2.21\n")
    result = run("zpl-fit", "--input", str(series))
    assert result.returncode == 7


def test_consistency_error(tmp_path):
    excited = tmp_path / "excited.snap"
    text = (ROOT / "data" / "excited.example.snap").read_text()
    excited.write_text(text.replace("cell 10.0 0.0 0.0", "cell 12.0 0.0 0.0"))
    result = run("dipole", "--ground", "data/ground.example.snap", "--excited", str(excited))
    assert result.returncode == 9
