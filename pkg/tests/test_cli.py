import csv
import io
import json

import pytest
from click.testing import CliRunner

from chipfire.cli import main

from conftest import DATA


@pytest.fixture
def run():
    runner = CliRunner()

    def go(*args, env=None):
        return runner.invoke(main, list(args), env=env)

    return go


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_simulate_k221_trace(run):
    r = run("simulate", "--graph", "complete_multipartite:2,2,1", "--chips", "0,3,1,2,2", "--steps", "5")
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert len(doc["trace"]) == 6
    assert doc["trace"][1]["chips"] == [0, 0, 2, 3, 3]
    assert doc["trace"][0]["firing"] == [1]
    # the printed position does not come back; the orbit it enters does
    assert doc["returns_at"] == []
    assert doc["trace"][5]["chips"] == doc["trace"][1]["chips"]


def test_simulate_zero_and_k22(run):
    r = run("simulate", "--graph", "complete:3", "--chips", "0,0,0", "--steps", "3")
    assert all(s["chips"] == [0, 0, 0] for s in json.loads(r.output)["trace"])
    r = run("simulate", "--graph", "complete_bipartite:2,2", "--chips", "1,2,1,2", "--steps", "2")
    assert json.loads(r.output)["returns_at"] == [2]


def test_simulate_formats(run):
    r = run("simulate", "--graph", "complete:3", "--chips", "2,0,0", "--steps", "2", "--format", "csv")
    assert rows(r.output)[0] == {"step": "0", "chips": "2 0 0", "firing": "0"}
    r = run("simulate", "--graph", "complete:3", "--chips", "2,0,0", "--steps", "2", "--format", "text")
    assert r.output.startswith("# complete:3")


def test_period_chips_file(run):
    r = run("period", "--chips-file", str(DATA / "k6554.json"))
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc["period"] == 11 and doc["fires_per_period"] == 1


def test_period_zero_and_both(run):
    r = run("period", "--graph", "complete:4", "--chips", "0,0,0,0")
    doc = json.loads(r.output)
    assert (doc["transient"], doc["period"]) == (0, 1)
    r = run("period", "--chips-file", str(DATA / "k6554.json"), "--method", "both")
    assert r.exit_code == 0 and json.loads(r.output)["method"] == "both"


def test_construct_bipartite(run):
    r = run("construct", "bipartite", "--a", "5", "--b", "7", "--period", "3")
    doc = json.loads(r.output)
    assert doc == {"graph": "complete_bipartite:5,7", "chips": [1, 2, 7, 7, 7, 1, 2, 5, 5, 5, 5, 5],
                   "target_period": 3}


def test_construct_cpartite_check(run):
    r = run("construct", "cpartite", "--parts", "6,5,5,4", "--j", "1", "--k", "2", "--check")
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc["measured_period"] == 11
    assert doc["chips"] == [0, 3, 6, 7, 7, 7, 1, 4, 7, 10, 10, 3, 6, 15, 15, 15, 3, 6, 16, 16]


def test_construct_output_round_trips(run, tmp_path):
    r = run("construct", "bipartite", "--a", "3", "--b", "4", "--period", "6")
    f = tmp_path / "pos.json"
    f.write_text(r.output)
    r = run("period", "--chips-file", str(f))
    assert json.loads(r.output)["period"] == 6


def test_exit_codes(run, tmp_path):
    r = run("construct", "bipartite", "--a", "3", "--b", "3", "--period", "7")
    assert r.exit_code == 4 and "{1,2,3,4,6}" in r.output
    r = run("construct", "cpartite", "--parts", "3,2", "--j", "5", "--k", "1")
    assert r.exit_code == 4
    r = run("construct", "cpartite", "--parts", "3,2", "--j", "0", "--k", "2")
    assert r.exit_code == 5
    r = run("period", "--graph", "complete:3", "--chips", "1,2")
    assert r.exit_code == 2
    r = run("period", "--graph", "cycle:2", "--chips", "1,1")
    assert r.exit_code == 2
    r = run("simulate", "--graph", "complete:3", "--chips", "a,b,c", "--steps", "1")
    assert r.exit_code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("period", "--chips-file", str(bad)).exit_code == 2
    r = run("period", "--chips-file", str(DATA / "k6554.json"), "--cap", "4")
    assert r.exit_code == 3
    r = run("period", "--chips-file", str(DATA / "k6554.json"), env={"CHIPFIRE_STEP_CAP": "4"})
    assert r.exit_code == 3
    r = run("enumerate", "--graph", "complete_bipartite:4,4")
    assert r.exit_code == 2


def test_enumerate_csv(run):
    r = run("enumerate", "--graph", "complete_bipartite:2,2", "--mode", "exhaustive")
    assert r.exit_code == 0
    got = rows(r.output)
    assert list(got[0]) == ["graph", "mode", "bound", "period", "count"]
    assert {int(x["period"]) for x in got} == {1, 2, 4}
    assert sum(int(x["count"]) for x in got) == 256


def test_enumerate_json_byte_identical(run):
    args = ("enumerate", "--graph", "complete_bipartite:2,3", "--mode", "random", "--samples", "200",
            "--seed", "4", "--format", "json")
    a, b = run(*args), run(*args)
    assert a.output == b.output
    assert json.loads(a.output)["seed"] == 4


def test_enumerate_mismatch_exit(run):
    r = run("enumerate", "--graph", "complete_bipartite:2,2", "--cap", "1")
    assert r.exit_code == 3


def test_verify_theorem(run):
    r = run("verify", "bipartite-theorem", "--max-a", "3", "--max-b", "3")
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc["all_match"] and len(doc["reports"]) == 6


def test_verify_class_trees(run):
    r = run("verify", "class", "--class", "trees", "--samples", "1000", "--seed", "7")
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc["violation_count"] == 0 and doc["seed"] == 7
    assert set(doc["periods"]) <= {"1", "2"}


def test_verify_lemmas_csv(run):
    r = run("verify", "lemmas", "--a", "2", "--b", "2", "--format", "csv", "--horizon", "10")
    assert r.exit_code == 0
    got = rows(r.output)
    assert list(got[0]) == ["check", "hypothesis_count", "violation_count"]
    assert all(x["violation_count"] == "0" for x in got)


def test_plot_dir(run, tmp_path):
    r = run("period", "--chips-file", str(DATA / "k6554.json"), "--plot-dir", str(tmp_path))
    assert r.exit_code == 0 and (tmp_path / "period.png").stat().st_size > 0
    r = run("enumerate", "--graph", "complete_bipartite:2,2", "--plot-dir", str(tmp_path))
    assert (tmp_path / "enumerate.png").exists()
    r = run("verify", "lemmas", "--a", "2", "--b", "2", "--horizon", "8", "--plot-dir", str(tmp_path))
    assert (tmp_path / "lemmas_2_2.png").exists()
