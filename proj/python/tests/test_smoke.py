import numpy as np
import pytest

import mfccert


def test_synthesis():
    k = mfccert.place_poles([-2, -2])
    np.testing.assert_array_equal(k, [-4, -4])
    k_tilde, D = mfccert.high_gain(k, 0.1)
    np.testing.assert_array_equal(k_tilde, [-400, -40])
    np.testing.assert_allclose(np.diag(D), [0.1, 1.0])
    P = mfccert.solve_lyapunov(k)
    np.testing.assert_allclose(P, np.array([[36, 4], [4, 5]]) / 32, atol=1e-12)
    assert mfccert.gamma_mfc(0.1, 1000, P) == pytest.approx(24.9256, rel=3e-3)
    assert mfccert.gamma_sl(P) == pytest.approx(2.4988, rel=1e-3)
    assert mfccert.gamma_slhg(0.1, P) == pytest.approx(24.9878, rel=1e-3)


def test_solve_cubic():
    assert mfccert.solve_cubic(1, -6, 11, -6) == pytest.approx([1, 2, 3])
    with pytest.raises(ValueError):
        mfccert.solve_cubic(0, 0, 0, 0)


def test_analyze_matches_numpy_lyapunov():
    a = mfccert.analyze("scenario1")
    P = np.array(a["P"])
    M = np.array([[0, 1], [-4, -4]])
    np.testing.assert_allclose(M.T @ P + P @ M, -np.eye(2), atol=1e-12)
    assert a["gamma"]["SLHG"] == pytest.approx(24.9878, rel=1e-3)


def test_steady_state_and_roa():
    s = mfccert.steady_state("scenario1")
    assert s["sl_multiplicity_loss_y_d"] == pytest.approx(1.95, abs=0.05)
    r = mfccert.roa("scenario1")
    kinds = {e["kind"]: e for e in r["estimates"]}
    assert kinds["SL"]["level"] == pytest.approx(0.75, rel=0.02)
    assert kinds["SLHG"]["level"] == pytest.approx(14.74, rel=0.01)


def test_simulate_returns_arrays():
    cfg = mfccert.config("scenario1")
    cfg["controllers"] = ["MFC"]
    cfg["perturbed_x0"] = []
    cfg["horizon"] = 2.0
    runs = mfccert.simulate(cfg)
    assert [r["label"] for r in runs] == ["MFC"]
    t = runs[0]["trajectory"]
    assert t["x"].shape == (2001, 2)
    assert t["t"][-1] == pytest.approx(2.0)
    assert runs[0]["metrics"]["u0"] == pytest.approx(12.81)


def test_config_errors_name_the_field():
    with pytest.raises(mfccert.ConfigError, match="controllers"):
        mfccert.analyze({"controllers": []})
    with pytest.raises(ValueError, match="epsilon"):
        mfccert.config({"epsilon": 2.0})


def test_config_round_trip():
    cfg = mfccert.config("scenario2")
    assert mfccert.config(cfg) == cfg
    assert mfccert.analyze(cfg) == mfccert.analyze("scenario2")


def test_falsify_small():
    cfg = mfccert.config("scenario1")
    cfg["falsify"] = {"samples": 20, "seed": 3}
    cfg["roa_kinds"] = ["SL"]
    reports = mfccert.falsify(cfg)
    assert len(reports) == 1
    assert reports[0]["violations"] == []
