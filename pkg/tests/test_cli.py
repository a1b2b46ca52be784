import json
import math
from pathlib import Path

import pytest

from disclosure_games.cli import DEFAULT_SEED, main

DATA = Path(__file__).resolve().parents[1] / "data"


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def simulated(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    assert run("simulate", "--out-dir", out, "--n-articles", 800, "--n-users", 150) == 0
    return out / "comments.csv"


def test_fit_outputs(simulated, tmp_path, capsys):
    assert run("fit", "--input", simulated, "--out-dir", tmp_path) == 0
    for name in ("fit_report.json", "powerlaw_fit.csv", "null_fit.csv", "residual_hist.csv", "qq.csv", "manifest.json"):
        assert (tmp_path / name).exists(), name
    report = json.loads((tmp_path / "fit_report.json").read_text())
    assert 2.0 < report["power_law"]["log_A"] < 2.4
    assert 0.6 < report["power_law"]["gamma"] < 0.85
    assert report["aic_comparison"]["preferred"] == "power_law"
    assert (tmp_path / "qq.csv").read_text().startswith("theoretical_q,sample_q\n")
    assert "log(A)" in capsys.readouterr().out


def test_fit_bundled_example(tmp_path):
    assert run("fit", "--input", DATA / "example_comments.csv", "--out-dir", tmp_path) == 0


def test_fit_empty_input(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("article_id,user_id,disclosed,timestamp,source\n")
    assert run("fit", "--input", empty, "--out-dir", tmp_path / "out") != 0
    assert "zero valid rows" in capsys.readouterr().err


def test_missing_input(tmp_path, capsys):
    assert run("fit", "--input", tmp_path / "nope.csv", "--out-dir", tmp_path) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_estimate_outputs(simulated, tmp_path):
    assert run("estimate", "--input", simulated, "--out-dir", tmp_path) == 0
    for name in ("xhat.csv", "betahat.csv", "x_vs_beta.json", "xhat_hist.csv", "betahat_hist.csv", "manifest.json"):
        assert (tmp_path / name).exists(), name
    doc = json.loads((tmp_path / "x_vs_beta.json").read_text())
    assert doc["n_strategies"] > 0 and doc["n_beta"] > 0
    assert doc["fit"] is not None
    assert len((tmp_path / "xhat.csv").read_text().splitlines()) == doc["n_strategies"] + 1


def test_estimate_overrides(simulated, tmp_path):
    assert run("estimate", "--input", simulated, "--out-dir", tmp_path, "--log-a", 2.2, "--gamma", 0.71) == 0
    doc = json.loads((tmp_path / "x_vs_beta.json").read_text())
    assert doc["A"] == pytest.approx(math.exp(2.2))


def test_estimate_nobody_qualifies(simulated, tmp_path, caplog):
    assert run("estimate", "--input", simulated, "--out-dir", tmp_path, "--min-posts", 10**6) == 0
    assert (tmp_path / "betahat.csv").read_text() == "user_id,beta_hat,n_articles_used\n"
    assert "min-posts" in caplog.text


@pytest.mark.parametrize(
    "game, expected",
    [
        ({"A": 1, "gamma": 1, "beta": [2, 3]}, [[0.0, 0.0]]),
        ({"A": 5, "gamma": 1, "beta": [2, 3]}, [[1.0, 1.0]]),
        ({"A": 4, "gamma": 0.5, "beta": [1.0, 1.9, 3.0]}, [[1.0, 0.0, 0.0]]),
    ],
)
def test_solve(tmp_path, game, expected):
    assert run("solve", "--game", json.dumps(game), "--out-dir", tmp_path) == 0
    doc = json.loads((tmp_path / "equilibria.json").read_text())
    xs = [c["x"] for c in doc["report"]["certificates"]]
    for x in expected:
        assert x in xs
    if len(expected) == 1 and game["gamma"] == 1:
        assert xs == expected
    assert "degenerate" in doc["report"]


def test_solve_from_file(tmp_path):
    path = tmp_path / "g.json"
    path.write_text('{"A": 2, "gamma": 0.71, "beta": [1.8, 1.8]}')
    assert run("solve", "--game", path, "--out-dir", tmp_path) == 0
    assert json.loads((tmp_path / "equilibria.json").read_text())["report"]["count"] == 3


def test_solve_bad_game(tmp_path, capsys):
    assert run("solve", "--game", '{"A": -1, "gamma": 1, "beta": [1]}', "--out-dir", tmp_path) == 1
    assert "error" in capsys.readouterr().err


def test_solve_over_cap(tmp_path):
    game = json.dumps({"A": 1, "gamma": 1, "beta": [1.0] * 6})
    assert run("solve", "--game", game, "--out-dir", tmp_path, "--enum-cap", 5) == 1


def test_manifest(simulated, tmp_path):
    run("fit", "--input", simulated, "--out-dir", tmp_path)
    doc = json.loads((tmp_path / "manifest.json").read_text())
    assert doc["seed"] == DEFAULT_SEED
    assert doc["command"] == "fit"
    assert {"disclosure_games", "numpy", "scipy"} <= set(doc["versions"])


def test_pipeline_is_byte_identical(tmp_path):
    outputs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert run("simulate", "--out-dir", d, "--n-articles", 300, "--n-users", 80, "--seed", 5) == 0
        assert run("fit", "--input", d / "comments.csv", "--out-dir", d, "--seed", 5) == 0
        assert run("estimate", "--input", d / "comments.csv", "--out-dir", d, "--seed", 5, "--min-posts", 5) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(d.glob("*.csv"))})
    assert outputs[0].keys() == outputs[1].keys() and len(outputs[0]) >= 10
    assert outputs[0] == outputs[1]
