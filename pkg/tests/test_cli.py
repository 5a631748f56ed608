"""Command-line surface: every subcommand, exit codes, file artifacts."""

import json
import subprocess
import sys

import pytest

from palab import PAGraph
from palab.cli import build_parser, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_generate_and_stats(tmp_path, capsys):
    gpath = tmp_path / "g.palab"
    code, out = run_cli(capsys, "generate", "--model", "c", "-m", "2",
                        "--delta", "-1", "--t", "400", "--seed", "3",
                        "--out", str(gpath))
    assert code == 0
    info = json.loads(out)
    assert info["t"] == 400 and info["model"] == "c"
    g = PAGraph.load(gpath)
    assert g.t == 400

    hist = tmp_path / "hist.csv"
    png = tmp_path / "deg.png"
    code, out = run_cli(capsys, "stats", str(gpath), "--sigma", "2.1",
                        "--hist", str(hist), "--plot", str(png))
    assert code == 0
    stats = json.loads(out)
    assert stats["t"] == 400 and stats["degree_sum"] == 1600
    assert stats["max_degree"] >= 2
    assert "core_size" in stats
    assert "u1" in stats  # tau = 2.5 < 3 exposes the first layer threshold
    assert hist.exists() and png.stat().st_size > 0


def test_distance_and_diameter(tmp_path, capsys):
    gpath = tmp_path / "g.palab"
    run_cli(capsys, "generate", "--model", "b", "-m", "2", "--delta", "1",
            "--t", "300", "--seed", "5", "--out", str(gpath))
    code, out = run_cli(capsys, "distance", str(gpath), "--source", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["source"] == 1
    assert rep["eccentricity"] >= 1
    assert sum(rep["level_counts"].values() if isinstance(rep["level_counts"], dict)
               else rep["level_counts"]) == rep["n_reached"]

    code, out = run_cli(capsys, "distance", str(gpath), "--source", "1",
                        "--target", "300")
    assert code == 0
    assert json.loads(out)["distance"] >= 1

    code, out = run_cli(capsys, "diameter", str(gpath), "--method", "exact", "--force")
    assert code == 0
    d_exact = json.loads(out)
    assert d_exact["lower"] == d_exact["upper"]

    code, out = run_cli(capsys, "diameter", str(gpath), "--method", "bounds")
    assert code == 0
    d_b = json.loads(out)
    assert d_b["lower"] <= d_exact["lower"] <= d_b["upper"]


def test_structure_subcommand(tmp_path, capsys):
    gpath = tmp_path / "g.palab"
    run_cli(capsys, "generate", "--model", "c", "-m", "2", "--delta", "-1",
            "--t", "200", "--seed", "2", "--out", str(gpath))
    summ = tmp_path / "summary.json"
    trees = tmp_path / "trees.csv"
    code, out = run_cli(capsys, "structure", str(gpath), "--sigma", "2.1",
                        "--depth", "1", "--summary", str(summ),
                        "--trees", str(trees))
    assert code == 0
    data = json.loads(summ.read_text())
    assert data["Z"] >= 0
    assert trees.read_text().startswith("root,size,collisions")


def test_theory_subcommand(capsys):
    code, out = run_cli(capsys, "theory", "--model", "c", "-m", "2", "--delta",
                        "-1", "--t", "1000000", "--sigma", "2.1", "--C", "0.5")
    assert code == 0
    d = json.loads(out)
    assert abs(d["tau"] - 2.5) < 1e-12
    for key in ("u1", "k_star", "C_G", "lambda_t"):
        assert key in d
    assert "gamma" not in d  # needs delta > -1


def test_verify_subcommand(capsys):
    assert run_cli(capsys, "verify", "layers")[0] == 0


def test_verify_unknown_suite_rejected(capsys):
    with pytest.raises(SystemExit):
        main(["verify", "nonsense"])  # argparse choices guard


def test_sweep_subcommand(tmp_path, capsys):
    cfg = tmp_path / "sweep.ini"
    cfg.write_text(
        "[grid]\nmodels = b\nm = 1\ndelta = 0\nt = 64\nseeds = 1\n"
        "master_seed = 1\n[metrics]\ndiameter = exact\ntypical_pairs = 40\n"
        f"[output]\ndir = {tmp_path / 'out'}\n"
    )
    code, _ = run_cli(capsys, "sweep", "--config", str(cfg))
    assert code == 0
    assert (tmp_path / "out" / "replicates.csv").exists()
    assert list((tmp_path / "out").glob("*.png"))


def test_missing_graph_file_is_io_error(tmp_path, capsys):
    code, _ = run_cli(capsys, "stats", str(tmp_path / "absent.palab"))
    assert code == 1


def test_bad_parameter_is_usage_error(tmp_path, capsys):
    code, _ = run_cli(capsys, "generate", "--model", "b", "-m", "1", "--delta",
                      "-1", "--t", "10", "--seed", "1",
                      "--out", str(tmp_path / "x.palab"))
    assert code == 2  # delta <= -m


def test_unknown_subcommand_exits(capsys):
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_parser_lists_all_subcommands():
    parser = build_parser()
    text = parser.format_help()
    for name in ("generate", "stats", "distance", "diameter", "structure",
                 "theory", "verify", "sweep"):
        assert name in text


def test_console_script_installed(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "palab.cli", "theory", "--model", "b", "-m", "1",
         "--delta", "0"],
        capture_output=True, text=True, timeout=60,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["tau"] == 3.0
