import json
import math
import os
from pathlib import Path

import pytest

import consistency_lab as cl

SCENARIOS = Path(os.environ.get("CLAB_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))


def test_total_variation():
    assert cl.total_variation([0.5, 0.5], [0.9, 0.1]) == pytest.approx(0.4)
    with pytest.raises(cl.ValidationError):
        cl.total_variation([0.5, 0.6], [0.5, 0.5])


def test_hull_and_kraft():
    a = [[1.0, 0.0], [0.0, 1.0]]
    b = [[0.5, 0.5]]
    r = cl.hull_variation(a, b)
    assert r["value"] == pytest.approx(0.0, abs=1e-12)
    assert sum(r["mixture_p"]) == pytest.approx(1.0)
    assert cl.kraft_bound(a, b) == pytest.approx(1.0)
    assert cl.kraft_bound([[1.0, 0.0]], [[0.0, 1.0]]) == pytest.approx(0.0)


def test_separation_and_chernoff():
    s = cl.separation([[0.5, 0.5]], [[0.9, 0.1], [0.2, 0.8]])
    assert s["margin"] == pytest.approx(0.3)
    assert s["witness1"] == 1
    expected = -math.log(2 * math.sqrt(0.25 * 0.75))
    assert cl.chernoff([0.25, 0.75], [0.75, 0.25]) == pytest.approx(expected)


def test_schedule_helpers():
    blocks = cl.block_lengths([0.5, 0.25, 0.125])
    assert len(blocks) == 3
    assert all(x >= 1 for x in blocks)
    assert cl.tail_bound(10, 0.5) == pytest.approx(math.exp(-5) / (1 - math.exp(-0.5)))
    assert 0.0 < cl.poisson_atom_tail_bound(1.0, 100, 0.5) < 1.0


def test_distinguish_verdicts():
    out = cl.run_file("distinguish", SCENARIOS / "sine_i2.json")
    assert out["exit_code"] == 2
    out = cl.run_file("distinguish", SCENARIOS / "sine_i1.json")
    assert out["exit_code"] == 0
    assert json.loads(out["manifest"])["command"] == "distinguish"


def test_simulate_is_deterministic(tmp_path):
    scenario = {
        "name": "k",
        "model": {"type": "density", "family": "kolmogorov", "u_list": [0.5]},
        "sim": {"replications": 300, "n_grid": [20, 80]},
    }
    a = cl.run_scenario("simulate", scenario, seed=3, workers=1)
    b = cl.run_scenario("simulate", scenario, seed=3, workers=2, out=tmp_path)
    assert a["tables"].keys() == b["tables"].keys()
    for name, table in a["tables"].items():
        assert table["csv"] == b["tables"][name]["csv"]
        assert (tmp_path / f"{name}.csv").read_text() == table["csv"]


def test_errors():
    with pytest.raises(cl.ValidationError):
        cl.run("simulate", "{not json")
    with pytest.raises(cl.ValidationError):
        cl.run("launch", (SCENARIOS / "sine_i1.json").read_text())
    zero = {
        "name": "z",
        "model": {"type": "finite"},
        "hypothesis": [[0.5, 0.5]],
        "alternative": [[0.9, 0.1], [0.5, 0.5]],
        "schedule": {},
    }
    with pytest.raises(cl.ConstructionError):
        cl.run_scenario("schedule", zero)
