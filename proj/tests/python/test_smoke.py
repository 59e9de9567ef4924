import json
import math

import pytest

import varconstrain as vc


def test_param_counts():
    assert vc.param_count("FF(50,3,2,1)") == 5301
    assert vc.param_count("LSTM(50,3,1,1)") == 21051
    assert len(vc.init_params("FF(50,3,2,1)", 7)) == 5301


def test_bad_spec_is_value_error():
    with pytest.raises(ValueError):
        vc.param_count("FF(1,2)")


def test_gauss_legendre_integrates_x6():
    nodes, weights = vc.gauss_legendre(4, 0.0, 2.0)
    assert abs(sum(w * x**6 for x, w in zip(nodes, weights)) - 2**7 / 7) < 1e-12


def test_schedules():
    assert vc.penalty_mu(1) == 100.0
    assert vc.penalty_mu(10**6) == 5000.0
    assert vc.learning_rate(1, L0=1e-3, D0=0.1, E=100, P=10) < 1e-3


def test_truth_errors_vanish():
    for name in ("minimal-surface", "geodesic", "grad-shafranov"):
        p = vc.make_problem(name)
        e = p.truth_errors()
        assert e["absolute_error"] < 1e-12
        assert e["constraint_error"] < 1e-12


def test_network_errors_finite():
    p = vc.make_problem("geodesic")
    e = p.errors("FF(4,1,1,1)", vc.init_params("FF(4,1,1,1)", 0))
    assert all(math.isfinite(e[k]) for k in ("absolute_error", "constraint_error"))
    with pytest.raises(ValueError):
        p.errors("FF(4,1,1,1)", [0.0])


def test_short_run(tmp_path):
    settings = {"E": "20", "P": "2", "log_every": "10", "arch.solution": "FF(4,1,1,1)",
                "quad.n1d": "8"}
    assert vc.run("geodesic", "penalty", tmp_path / "run", settings) == 0
    lines = (tmp_path / "run" / "errors.csv").read_text().splitlines()
    assert lines[0].startswith("iteration,wall_time_s,loss")
    assert len(lines) == 3
    summary = json.loads((tmp_path / "run" / "summary.json").read_text())
    assert summary["status"] == "completed"
    assert len(vc.report([tmp_path / "run"], tmp_path / "rep")) == 4
