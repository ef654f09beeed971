import xml.etree.ElementTree as ET

import pytest

from gpscale.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_express_worked_example(capsys):
    code, out, _ = run_cli(
        capsys,
        "express", "--problem", "order", "--l", "4",
        "(JOIN (JOIN ~X3 X1) (JOIN (JOIN ~X1 ~X2) (JOIN X4 ~X3)))",
    )
    assert code == 0
    lines = out.splitlines()
    assert "leaves=~X3 X1 ~X1 ~X2 X4 ~X3" in lines
    assert "expressed=X1 ~X2 ~X3 X4" in lines
    assert "bits=1001" in lines
    assert "fitness=2.0" in lines


def test_express_neg_join_and_junk(capsys):
    code, out, _ = run_cli(
        capsys,
        "express", "--problem", "order", "--l", "2", "--neg-join", "--junk", "1",
        "(NEG_JOIN (JOIN ~X1 J1) X2)",
    )
    assert code == 0
    assert "bits=10" in out.splitlines()
    assert "fitness=1.0" in out.splitlines()


def test_express_trap_fitness(capsys):
    code, out, _ = run_cli(
        capsys,
        "express", "--problem", "trap", "--l", "3", "--k", "3", "--delta", "0.25",
        "(JOIN X1 (JOIN X2 X3))",
    )
    assert code == 0
    assert "fitness=1.0" in out.splitlines()


def test_express_rejects_symbols_outside_the_instance(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(capsys, "express", "--problem", "order", "--l", "2", "(JOIN X1 X9)")
    assert exc.value.code == 2


def test_run_gp_trivial_success(capsys):
    code, out, _ = run_cli(
        capsys,
        "run", "--algo", "gp", "--problem", "order", "--l", "1",
        "--pop", "16", "--seed", "7",
    )
    assert code == 0
    lines = out.splitlines()
    assert "success=true" in lines
    assert "evaluations=16" in lines
    assert "generations_used=0" in lines
    assert "best_fitness=1.0" in lines


def test_run_exit_code_on_failure(capsys):
    code, out, _ = run_cli(
        capsys,
        "run", "--algo", "gp", "--problem", "order", "--l", "5",
        "--pop", "8", "--seed", "0", "--max-gens", "0",
    )
    assert code == 1
    assert "success=false" in out.splitlines()


def test_run_pipe_with_model_dump(capsys):
    code, out, _ = run_cli(
        capsys,
        "run", "--algo", "pipe", "--problem", "order", "--l", "3",
        "--pop", "32", "--seed", "5", "--dump-model",
    )
    assert code == 0
    if "generations_used=0" not in out.splitlines():
        assert any(line.startswith("/: {") for line in out.splitlines())


def test_run_rejects_odd_population(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(capsys, "run", "--algo", "gp", "--problem", "order", "--l", "2",
                "--pop", "7")
    assert exc.value.code == 2


def test_run_rejects_unknown_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(capsys, "run", "--algo", "gp", "--l", "2", "--pop", "8", "--frobnicate")
    assert exc.value.code == 2


def test_bisect_prints_probe_history_and_result(capsys):
    code, out, _ = run_cli(
        capsys,
        "bisect", "--algo", "gp", "--problem", "order", "--l", "1",
        "--runs", "5", "--seed", "3",
    )
    assert code == 0
    lines = out.splitlines()
    assert any(line.startswith("probe pop_size=16 ") for line in lines)
    assert any(line.startswith("min_pop_size=") for line in lines)
    assert "runs=5" in lines


def test_bisect_reports_sizing_failure_with_exit_1(capsys):
    code, out, err = run_cli(
        capsys,
        "bisect", "--algo", "gp", "--problem", "trap", "--l", "33",
        "--delta", "1.0", "--runs", "3", "--pop-ceiling", "64", "--seed", "0",
    )
    assert code == 1
    assert "sizing_failed=true" in out.splitlines()
    assert "error:" in err


def test_sweep_writes_reports(tmp_path, capsys):
    out_dir = tmp_path / "results"
    code, out, _ = run_cli(
        capsys,
        "sweep", "--plan", "order", "--sizes", "2,3", "--algo", "both",
        "--runs", "5", "--seed", "1", "--out", str(out_dir),
    )
    assert code == 0
    csv_path = out_dir / "order.csv"
    svg_path = out_dir / "order.svg"
    assert csv_path.exists() and svg_path.exists()
    rows = csv_path.read_text().splitlines()
    assert len(rows) == 1 + 4  # header + 2 algorithms x 2 sizes
    ET.parse(svg_path)  # well-formed XML
    assert out.count("row algorithm=") == 4


def test_sweep_single_algorithm_and_size_override(tmp_path, capsys):
    out_dir = tmp_path / "results"
    code, out, _ = run_cli(
        capsys,
        "sweep", "--plan", "order", "--sizes", "2", "--algo", "gp",
        "--runs", "4", "--out", str(out_dir),
    )
    assert code == 0
    assert (out_dir / "order.csv").read_text().count("\n") == 2


def test_sweep_exit_1_when_a_cell_hits_the_ceiling(tmp_path, capsys):
    code, out, _ = run_cli(
        capsys,
        "sweep", "--plan", "trap", "--sizes", "33", "--algo", "gp",
        "--runs", "3", "--pop-ceiling", "64", "--out", str(tmp_path),
    )
    assert code == 1
    body = (tmp_path / "trap.csv").read_text().splitlines()[1]
    assert body.split(",")[10] != "1.0"  # success_rate column flags the abort


def test_sweep_rejects_bad_sizes(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(capsys, "sweep", "--plan", "order", "--sizes", "2;3", "--out", "/tmp/x")
    assert exc.value.code == 2


def test_cli_stdout_is_deterministic(tmp_path, capsys):
    argv = ["sweep", "--plan", "order", "--sizes", "2,3", "--algo", "gp",
            "--runs", "4", "--seed", "9", "--out", str(tmp_path / "a")]
    code1, out1, _ = run_cli(capsys, *argv)
    argv[-1] = str(tmp_path / "b")
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1.replace(str(tmp_path / "a"), "") == out2.replace(str(tmp_path / "b"), "")
    assert (tmp_path / "a" / "order.csv").read_bytes() == (
        tmp_path / "b" / "order.csv"
    ).read_bytes()


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    for sub in ("run", "bisect", "sweep", "express"):
        assert sub in out
