"""Smoke tests for the python bindings."""

import math

import pytest

import msm


def test_version():
    assert msm.__version__ == "0.1.0"


def test_simulate_is_deterministic():
    a = msm.simulate(m0=1.5, sigma=1.0, k=8, T=500, seed=7)
    b = msm.simulate(m0=1.5, sigma=1.0, k=8, T=500, seed=7)
    c = msm.simulate(m0=1.5, sigma=1.0, k=8, T=500, seed=8)
    assert len(a) == 500
    assert a == b
    assert a != c


def test_simulate_rejects_bad_params():
    with pytest.raises(ValueError):
        msm.simulate(m0=2.5, sigma=1.0, k=8, T=100)


def test_transition_probabilities():
    probs = msm.transition_probabilities(k=3)
    assert len(probs) == 3
    assert probs[-1] == pytest.approx(0.5)
    assert probs == sorted(probs)
    assert probs[0] == pytest.approx(1 - (1 - 0.5) ** (2.0 ** (-2)))


def test_ghe_of_a_ramp_is_one():
    ramp = [float(t) for t in range(200)]
    assert msm.ghe(ramp, q=2.0, tau_max=10) == pytest.approx(1.0, abs=1e-9)


def test_ghe_averaged_shape():
    r = msm.simulate(m0=1.5, sigma=1.0, k=6, T=2000, seed=3)
    g = msm.ghe_averaged(r, q=1.0)
    assert 0.5 < g["h"] < 1.0
    assert g["h_std"] >= 0.0
    assert g["mode"] == "integrated"


def test_lo_statistic_denominators():
    r = msm.simulate(m0=1.4, sigma=1.0, k=5, T=3000, seed=11)
    x = [abs(v) for v in r]
    std = msm.lo_statistic(x, tau=0)
    zl = msm.lo_statistic(x, tau=0, denominator="newey_west_zero_lag")
    # at tau=0 the zero-lag variant triples the variance in the denominator
    assert (std["q_stat"] / zl["q_stat"]) ** 2 == pytest.approx(3.0, rel=1e-12)
    assert std["v_stat"] == pytest.approx(std["q_stat"] / math.sqrt(len(x)))


def test_gmm_recovers_the_multiplier():
    r = msm.simulate(m0=1.5, sigma=1.0, k=5, T=8000, seed=21)
    fit = msm.gmm_estimate(r, k=5)
    assert fit["converged"]
    assert abs(fit["m0_hat"] - 1.5) < 0.15
    assert abs(fit["sigma_hat"] - 1.0) < 0.15


def test_standardize_unit_std():
    r = msm.simulate(m0=1.5, sigma=2.0, k=5, T=1000, seed=5)
    z = msm.standardize(r)
    mean = sum(z) / len(z)
    var = sum(v * v for v in z) / len(z) - mean * mean
    assert math.sqrt(var) == pytest.approx(1.0, rel=1e-9)


def test_load_csv_missing_file_raises_oserror():
    with pytest.raises(OSError):
        msm.load_csv("/definitely/not/here.csv")


def test_to_returns_log():
    out = msm.to_returns([1.0, math.e, math.e], transform="log")
    assert out == pytest.approx([1.0, 0.0])


def test_mc_ensemble_small():
    res = msm.mc_ensemble([(4, 1.4, 1.0)], T=400, ghe_reps=5, lo_reps=5,
                          tau_set=[0, 5], q_set=[1.0], seed=9, threads=2)
    assert res["excluded"] == 0
    assert len(res["ghe"]) == 1
    assert len(res["ghe"][0]["h"]) == 5
    assert len(res["lo"]) == 2
    rerun = msm.mc_ensemble([(4, 1.4, 1.0)], T=400, ghe_reps=5, lo_reps=5,
                            tau_set=[0, 5], q_set=[1.0], seed=9, threads=1)
    assert rerun["ghe"][0]["h"] == res["ghe"][0]["h"]
