import json

import pytest

from ising_interfaces import cli
from ising_interfaces.interface import cells_to_plus, flat_interface, read_interface, write_interface
from ising_interfaces.lattice import Box
from ising_interfaces.verification import ring_environment
from ising_interfaces.walls import write_collection


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_sample_is_deterministic(tmp_path, capsys):
    args = ["sample", "--n", "3", "--H", "3", "--samples", "3", "--seed", "9", "--sweeps-between", "2",
            "--burn-in", "5"]
    assert run(args + ["--out", str(tmp_path / "a")], capsys)[0] == 0
    assert run(args + ["--out", str(tmp_path / "b")], capsys)[0] == 0
    for name in ("interface_00000.isf", "interface_00002.isf", "snapshot_00001.isi", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_usage_errors_exit_one(capsys):
    assert run(["sample", "--n", "3"], capsys)[0] == 1
    assert run([], capsys)[0] == 1
    assert run(["stats"], capsys)[0] == 1
    assert run(["sample", "--bogus"], capsys)[0] == 1
    assert run(["pillar", "--input", "x.isf", "--x", "nonsense"], capsys)[0] == 1


def test_missing_input_exits_two(capsys, tmp_path):
    code, _, err = run(["decompose", "--input", str(tmp_path / "nope.isf")], capsys)
    assert code == 2 and "does not exist" in err


def test_decompose_and_pillar(tmp_path, capsys):
    box = Box(3, 3, 3)
    path = tmp_path / "bump.isf"
    write_interface(path, cells_to_plus(flat_interface(box), [(1, 1, 1)]))
    code, out, _ = run(["decompose", "--input", str(path)], capsys)
    rec = records(out)[0]
    assert code == 0 and rec["walls"] == 1 and rec["ceilings"] == 2 and rec["total_excess"] == 4
    code, out, _ = run(["pillar", "--input", str(path), "--x", "0,0"], capsys)
    rec = records(out)[0]
    assert code == 0 and rec["x"] == [1, 1] and rec["hgt"] == 1 and rec["cells"] == 1


def test_maps_insert_and_delete(tmp_path, capsys):
    box = Box(3, 3, 4)
    path = tmp_path / "flat.isf"
    write_interface(path, flat_interface(box))
    res = tmp_path / "res"
    code, out, _ = run(["maps", "--input", str(path), "--insert-column", "--x", "0,0", "--height", "2",
                        "--result-dir", str(res)], capsys)
    assert code == 0
    made = sorted(res.iterdir())
    assert len(made) == 1
    J = read_interface(made[0])
    assert len(J) - len(flat_interface(box)) == 8
    res2 = tmp_path / "res2"
    code, out, _ = run(["maps", "--input", str(made[0]), "--psi-delete", "--x", "0,0", "--result-dir", str(res2)],
                       capsys)
    assert code == 0
    assert read_interface(sorted(res2.iterdir())[0]) == flat_interface(box)


def test_maps_precondition_exits_two(tmp_path, capsys):
    box = Box(3, 3, 3)
    path = tmp_path / "flat.isf"
    write_interface(path, flat_interface(box))
    code, _, _ = run(["maps", "--input", str(path), "--psi-delete", "--x", "0,0"], capsys)
    assert code == 2


def test_conditional_sample_with_constraint(tmp_path, capsys):
    box = Box(4, 4, 3)
    _, S, W = ring_environment(box, 3)
    con = tmp_path / "ring.json"
    write_collection(con, W, S)
    code, _, _ = run(["conditional-sample", "--n", "4", "--H", "3", "--samples", "2", "--seed", "3",
                      "--sweeps-between", "2", "--burn-in", "5", "--constraint", str(con),
                      "--out", str(tmp_path / "c")], capsys)
    assert code == 0
    files = sorted((tmp_path / "c").glob("interface_*.isf"))
    assert len(files) == 2
    code, out, _ = run(["pillar", "--input", str(files[0]), "--x", "0,0", "--constraint", str(con)], capsys)
    assert code == 0 and records(out)[0]["x"] == [1, 1]


def test_stats_alpha_and_mstar(tmp_path, capsys):
    out_dir = tmp_path / "alpha"
    code, _, _ = run(["stats", "alpha", "--n", "4", "--H", "3", "--samples", "30", "--seed", "2",
                      "--sweeps-between", "2", "--burn-in", "20", "--h", "1..2", "--out", str(out_dir)], capsys)
    assert code in (0, 3)
    csv_text = (out_dir / "alpha.csv").read_text()
    assert csv_text.startswith("# config_hash=")
    rec = records((out_dir / "alpha.jsonl").read_text())[0]
    assert rec["superadditivity_eps"] == 1.0
    assert code == (3 if rec["superadditivity_violations"] else 0)
    table = tmp_path / "synthetic.csv"
    table.write_text("h,alpha\n" + "".join(f"{h},{4 * h}\n" for h in range(1, 8)))
    code, out, _ = run(["stats", "mstar", "--s", str(2.718281828459045 ** 10), "--alpha-file", str(table)], capsys)
    rec = records(out)[0]
    assert code == 0 and rec["m_star"] == 3 and rec["gamma_in_corridor"]


def test_stats_min_samples(tmp_path, capsys):
    box = Box(3, 3, 3)
    path = tmp_path / "flat.isf"
    write_interface(path, flat_interface(box))
    code, _, err = run(["stats", "tails", "--input", str(path), "--min-samples", "5"], capsys)
    assert code == 2 and "insufficient samples" in err
    code, out, _ = run(["stats", "tails", "--input", str(path)], capsys)
    assert code == 0


def test_config_file_merges_with_flags(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "H": 3, "samples": 1, "seed": 5, "burn_in": 2, "sweeps_between": 1}))
    code, _, _ = run(["sample", "--config", str(cfg), "--out", str(tmp_path / "o")], capsys)
    assert code == 0
    cfg.write_text(json.dumps({"n": 3, "unknown_key": 1}))
    assert run(["sample", "--config", str(cfg), "--out", str(tmp_path / "p")], capsys)[0] == 1


def test_verify_reports_and_exit_codes(tmp_path, capsys):
    report = tmp_path / "r.json"
    code, out, _ = run(["verify", "quick", "--only", "2,12", "--out", str(report)], capsys)
    assert code == 0
    assert "PASS criterion  2" in out and "PASS criterion 12" in out
    doc = json.loads(report.read_text())
    assert [c["criterion"] for c in doc["results"]] == [2, 12]
    assert doc["provenance"]["seed"] == 1
