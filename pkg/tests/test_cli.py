"""End-to-end command line checks driven through main()."""
import json

import pytest

from hourglass import TOOL_VERSION
from hourglass.cli import main

DIAMOND = "s1 a\ns2 a\na t1\na t2\n"


@pytest.fixture
def diamond_file(tmp_path):
    path = tmp_path / "diamond.txt"
    path.write_text(DIAMOND)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- analyze ---------------------------------------------------------------------


def test_analyze_json_to_stdout(capsys, diamond_file):
    code, out, err = run(capsys, "analyze", diamond_file, "--json", "-")
    assert code == 0
    assert err == ""
    report = json.loads(out)
    assert report["core"]["size"] == 1
    assert report["core"]["flat_core_size"] == 2
    assert report["core"]["h_score"] == 0.5
    assert report["network"]["st_path_count"] == "4"
    assert report["provenance"]["tool_version"] == TOOL_VERSION


def test_analyze_reports_are_byte_identical(capsys, diamond_file):
    _, first, _ = run(capsys, "analyze", diamond_file, "--json", "-")
    _, second, _ = run(capsys, "analyze", diamond_file, "--json", "-")
    assert first == second


def test_analyze_human_summary(capsys, diamond_file):
    code, out, _ = run(capsys, "analyze", diamond_file)
    assert code == 0
    assert "h score" in out
    assert "core element" in out


def test_analyze_csv_and_dot_files(capsys, tmp_path, diamond_file):
    csv_path = tmp_path / "metrics.csv"
    dot_path = tmp_path / "net.dot"
    code, _, _ = run(
        capsys, "analyze", diamond_file,
        "--csv", str(csv_path), "--dot", str(dot_path),
    )
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "vertex,class,ps,pt,p,p_frac,location,in_core,core_weight"
    assert "a,intermediate,2,2,4,1.0,0.5,true,1.0" in lines
    assert dot_path.read_text().startswith("digraph {")


def test_analyze_reactions_format(capsys, tmp_path):
    path = tmp_path / "rx.txt"
    path.write_text("A + B -> C\nC -> D\n")
    code, out, _ = run(
        capsys, "analyze", str(path), "--format", "reactions", "--json", "-"
    )
    assert code == 0
    report = json.loads(out)
    assert report["network"]["vertices"] == 4
    assert report["network"]["st_path_count"] == "2"


def test_analyze_exclude_and_lwcc(capsys, tmp_path):
    graph = tmp_path / "g.txt"
    graph.write_text("s1 a\na t1\nx y\nskipme t1\n")
    drop = tmp_path / "drop.txt"
    drop.write_text("# names\nskipme\nmissing\n")
    code, out, _ = run(
        capsys, "analyze", str(graph),
        "--exclude", str(drop), "--lwcc", "--json", "-",
    )
    assert code == 0
    report = json.loads(out)
    assert report["network"]["excluded"] == 1
    assert report["network"]["excluded_unknown"] == 1
    assert report["network"]["vertices"] == 3
    assert report["provenance"]["lwcc"] is True


def test_analyze_missing_file(capsys):
    code, _, err = run(capsys, "analyze", "/nonexistent/graph.txt", "--json", "-")
    assert code == 1
    assert "error:" in err


def test_analyze_pathless_network(capsys, tmp_path):
    path = tmp_path / "cycle.txt"
    path.write_text("x y\ny x\n")
    code, _, err = run(capsys, "analyze", str(path))
    assert code == 1
    assert "no source-target paths" in err


def test_unknown_flag_exits_one(capsys, diamond_file):
    code, _, err = run(capsys, "analyze", diamond_file, "--bogus")
    assert code == 1
    assert "usage" in err


def test_version_flag(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0
    assert TOOL_VERSION in out


# --- flatten ---------------------------------------------------------------------


def test_flatten_to_stdout(capsys, diamond_file):
    code, out, _ = run(capsys, "flatten", diamond_file)
    assert code == 0
    assert out == "s1 t1\ns1 t2\ns2 t1\ns2 t2\n"


# --- generate --------------------------------------------------------------------


def test_generate_rp_deterministic(capsys, tmp_path):
    out1 = tmp_path / "a.txt"
    out2 = tmp_path / "b.txt"
    argv = [
        "generate", "rp", "--sources", "5", "--intermediates", "10",
        "--targets", "5", "--alpha", "1.0", "--indegree", "poisson:2",
        "--seed", "7",
    ]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    capsys.readouterr()
    assert out1.read_text() == out2.read_text()
    assert out1.read_text().count("\n") >= 15


def test_generate_rp_template(capsys, tmp_path, diamond_file):
    code, out, _ = run(
        capsys, "generate", "rp", "--template", diamond_file,
        "--alpha", "0.5", "--seed", "1",
    )
    assert code == 0
    assert all(len(line.split()) == 2 for line in out.splitlines())


def test_generate_rp_requires_counts(capsys):
    code, _, err = run(capsys, "generate", "rp", "--alpha", "1.0")
    assert code == 1
    assert "error:" in err


def test_generate_bad_indegree_spec(capsys):
    code, _, err = run(
        capsys, "generate", "rp", "--sources", "2", "--intermediates", "2",
        "--targets", "2", "--alpha", "0.0", "--indegree", "zipf:3",
    )
    assert code == 1
    assert "in-degree" in err


def test_generate_edgecopy(capsys, tmp_path, diamond_file):
    code, out, _ = run(
        capsys, "generate", "edgecopy", "--template", diamond_file,
        "--beta", "0.5", "--seed", "3",
    )
    assert code == 0
    assert len(out.splitlines()) == 4


# --- fit and sweep ----------------------------------------------------------------


def test_fit_reports_best_alpha(capsys, tmp_path, diamond_file):
    grid = tmp_path / "grid.csv"
    code, out, _ = run(
        capsys, "fit", diamond_file,
        "--alpha-min", "0.0", "--alpha-max", "0.1", "--alpha-step", "0.1",
        "--ensemble", "2", "--workers", "1", "--csv", str(grid),
    )
    assert code == 0
    assert out.startswith("best alpha ")
    lines = grid.read_text().splitlines()
    assert lines[0] == "alpha,h_mean,h_ci"
    assert len(lines) == 3


def test_sweep_rp_csv(capsys):
    code, out, _ = run(
        capsys, "sweep", "rp", "--sources", "4", "--intermediates", "6",
        "--targets", "4", "--indegree", "const:2", "--alphas=-1,1",
        "--runs", "2", "--workers", "1",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("param,value,runs,h_mean")
    assert len(lines) == 3
    assert lines[1].startswith("alpha,-1")
    assert lines[2].startswith("alpha,1")


def test_sweep_edgecopy_csv(capsys, diamond_file):
    code, out, _ = run(
        capsys, "sweep", "edgecopy", "--template", diamond_file,
        "--betas", "0.2,0.8", "--runs", "2", "--workers", "1",
    )
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 3
    assert all(line.startswith("beta,") for line in lines[1:])
