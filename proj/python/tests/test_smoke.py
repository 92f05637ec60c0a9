import math
import os
from pathlib import Path

import numpy as np
import pytest

import navsim

SCENARIOS = Path(os.environ.get("NAVSIM_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))


@pytest.fixture()
def scenario():
    sc = navsim.Scenario.load(SCENARIOS / "paper.json")
    sc.duration_tu = 0.3
    return sc


@pytest.fixture()
def gain(scenario):
    return navsim.initial_gain(scenario)


def test_propagate_conserves_jacobi():
    s0 = np.array([1.02950089, 0.0, -0.18680810, 0.0, -0.11898000, 0.0])
    t, states = navsim.propagate(s0, 0.0, 1.0)
    assert states.shape == (len(t), 6)
    assert t[-1] == pytest.approx(1.0)
    c = [navsim.jacobi_constant(s) for s in states]
    assert max(abs(x - c[0]) for x in c) < 1e-9


def test_ranges_round_trip():
    mu = navsim.EARTH_MOON_MU
    p = np.array([1.02950089, 0.0, -0.18680810])
    d1 = np.array([-mu, 0, 0]) - p
    d2 = np.array([1 - mu, 0, 0]) - p
    r1, r2 = navsim.reconstruct_ranges(d1 / np.linalg.norm(d1), d2 / np.linalg.norm(d2))
    assert r1 == pytest.approx(np.linalg.norm(d1), abs=1e-12)
    assert r2 == pytest.approx(np.linalg.norm(d2), abs=1e-12)
    with pytest.raises(navsim.NearCollinear):
        navsim.reconstruct_ranges(np.array([-1.0, 0, 0]), np.array([1.0, 0, 0]))


def test_hinf_first_order():
    assert navsim.hinf_norm([[-2.0]], [[1.0]], [[1.0]], [[0.0]]) == pytest.approx(0.5, rel=1e-6)
    with pytest.raises(navsim.Unstable):
        navsim.hinf_norm([[1.0]], [[1.0]], [[1.0]], [[0.0]])


def test_simulate_is_seeded(scenario, gain):
    a = navsim.simulate(scenario, gain, seed=4)
    b = navsim.simulate(scenario, gain, seed=4)
    c = navsim.simulate(scenario, gain, seed=5)
    n = int(math.floor(scenario.duration_tu / scenario.step)) + 1
    assert a["truth"].shape == (n, 6)
    np.testing.assert_array_equal(a["error"], a["truth"] - a["estimate"])
    np.testing.assert_array_equal(a["estimate"], b["estimate"])
    assert not np.array_equal(a["estimate"], c["estimate"])
    assert set(a["rho_source"]) <= {"measured", "estimate_fallback", "clamped"}


def test_csv_and_analyze_agree(tmp_path, scenario, gain):
    stats = navsim.simulate_to_csv(scenario, gain, tmp_path / "run.csv", seed=2)
    again = navsim.analyze(tmp_path / "run.csv")
    assert again["samples"] == stats["samples"]
    assert again["rms"] == pytest.approx(stats["rms"], rel=1e-12)


def test_monte_carlo_writes_runs(tmp_path, scenario, gain):
    mc = navsim.monte_carlo(scenario, gain, runs=3, seed=10, out_dir=str(tmp_path))
    assert mc["seeds"] == [10, 11, 12]
    assert len(list(tmp_path.glob("run_*.csv"))) == 3
    assert mc["position_max"] >= mc["position_median"]


def test_gain_json_round_trip(tmp_path, gain):
    gain.save(tmp_path / "gain.json")
    back = navsim.ObserverGain.load(tmp_path / "gain.json")
    np.testing.assert_array_equal(back.L, gain.L)
    assert back.gamma == gain.gamma


def test_config_errors():
    with pytest.raises(navsim.ValidationError):
        navsim.Scenario.parse('{"param_box": {"r1_min": 1.2, "r1_max": 1.1}}')
    with pytest.raises(navsim.ParseError):
        navsim.Scenario.parse("{")
    assert issubclass(navsim.ValidationError, navsim.ConfigError)
    assert issubclass(navsim.ConfigError, navsim.Error)
