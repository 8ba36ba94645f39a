import json

import pytest

from onestreet.cli import EXIT_CONVERGENCE, EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from onestreet.dataset import load_dataset
from onestreet.learners import EvalReport, load_model


@pytest.fixture(scope="module")
def games(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "games.jsonl"
    assert main(["gen", "--count", "12", "--seed", "4", "--jobs", "1", "--out", str(path)]) == EXIT_OK
    return path


def test_gen_writes_dataset_and_manifest(games):
    ds = load_dataset(games)
    assert len(ds) == 12 and ds.master_seed == 4
    run = json.loads(games.with_name(games.name + ".manifest.json").read_text())
    assert run["command"] == "gen" and run["seed"] == 4
    assert run["config"]["deck_size"] == 10 and run["outputs"] == [str(games)]


def test_solve_preset(capsys, tmp_path):
    out = tmp_path / "s.json"
    assert main(["solve", "--preset", "p1-polar", "--method", "lp", "--out", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "Card 1: Bet 0.0 pr 0.250, 3.0 pr 0.750" in text
    assert "Value: 0.375000" in text
    assert json.loads(out.read_text())["value"] == pytest.approx(0.375)


def test_solve_from_marginal_weights(capsys):
    ones = ",".join(["1"] * 10)
    assert main(["solve", "--p1", ones, "--p2", ones]) == EXIT_OK
    out = capsys.readouterr().out
    value = float(out.split("Value: ")[1].split()[0])
    # the game value is 0.0657365; a certified profile lies within epsilon of it
    assert value == pytest.approx(0.0657365, abs=1e-4)


def test_solve_from_deal_file(tmp_path, capsys):
    deal = tmp_path / "deal.txt"
    rows = [" ".join("0" if i == j else "0.011111111111111112" for j in range(10)) for i in range(10)]
    deal.write_text("\n".join(rows))
    assert main(["solve", "--deal-file", str(deal), "--method", "lp"]) == EXIT_OK
    assert "Card 3: Bet 0.0 pr 1.000" in capsys.readouterr().out


def test_train_eval_rules_check_export(games, tmp_path, capsys):
    tree = tmp_path / "tree.json"
    assert main(["train", "--in", str(games), "--rep", "r9", "--depth", "3", "--out", str(tree)]) == EXIT_OK
    assert load_model(tree).max_depth == 3
    report = tmp_path / "eval.csv"
    assert main(["eval", "--model-file", str(tree), "--in", str(games), "--out", str(report)]) == EXIT_OK
    row = EvalReport.read_csv(report).rows[0]
    assert row["rep"] == "R9" and 0 <= row["test_error"] <= 1
    assert main(["rules", "--model-file", str(tree)]) == EXIT_OK
    assert "bet" in capsys.readouterr().out
    knn = tmp_path / "knn.json"
    assert main(["train", "--in", str(games), "--rep", "3", "--model", "knn", "--k", "1",
                 "--out", str(knn)]) == EXIT_OK
    assert main(["rules", "--model-file", str(knn)]) == EXIT_USAGE
    checks = tmp_path / "check.csv"
    assert main(["check", "--probes", str(games), "--model-file", str(tree), "--out", str(checks)]) == EXIT_OK
    assert checks.read_text().splitlines()[0] == "rule,basis,compliance,probes"
    csv = tmp_path / "x.csv"
    assert main(["export", "--in", str(games), "--rep", "r5", "--out", str(csv)]) == EXIT_OK
    assert len(csv.read_text().splitlines()) == 1 + 120


def test_sweep_outputs(games, tmp_path):
    prefix = tmp_path / "sweep"
    assert main(["sweep", "--in", str(games), "--reps", "r1,r7", "--depths", "3-5", "--jobs", "1",
                 "--out", str(prefix)]) == EXIT_OK
    report = EvalReport.read_csv(tmp_path / "sweep.csv")
    assert len(report.rows) == 6
    series = (tmp_path / "sweep_series.csv").read_text().splitlines()
    assert len(series) == 1 + 12
    assert (tmp_path / "sweep_depth.svg").read_text().startswith("<svg")
    assert (tmp_path / "sweep_nodes.svg").exists()
    assert (tmp_path / "sweep.csv.manifest.json").exists()


def test_exit_codes(tmp_path, games, capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve", "--bogus"])
    assert info.value.code == EXIT_USAGE
    assert main(["solve"]) == EXIT_USAGE
    assert main(["solve", "--p1", "1,2", "--p2", "1,2"]) == EXIT_USAGE
    capsys.readouterr()
    neg = ",".join(["-1"] + ["1"] * 9)
    assert main(["solve", f"--p1={neg}", f"--p2={neg}"]) == EXIT_DATA
    assert "InvalidDistribution" in capsys.readouterr().err
    assert main(["eval", "--model-file", str(tmp_path / "none"), "--in", str(games),
                 "--out", str(tmp_path / "o")]) == EXIT_DATA
    assert main(["train", "--in", str(games), "--rep", "r11", "--out", str(tmp_path / "m")]) == EXIT_DATA
    assert main(["solve", "--preset", "uniform", "--epsilon", "1e-12", "--max-iterations", "100"]) \
        == EXIT_CONVERGENCE
    assert "ConvergenceFailure" in capsys.readouterr().err


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for path in (a, b):
        assert main(["gen", "--count", "10", "--seed", "7", "--jobs", "1", "--out", str(path)]) == EXIT_OK
    body = lambda p: p.read_text().split("\n", 1)[1]  # noqa: E731
    assert body(a) == body(b)
