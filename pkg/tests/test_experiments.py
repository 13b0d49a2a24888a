import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from revroute.core import makespan
from revroute.experiments import (FitError, SweepResult, bitization_check, expect_max_check,
                                  fit_mu, fit_sigma, read_sweep_csv, sparse_envelope,
                                  sparse_permutation, sweep, write_sweep_csv)
from revroute.path_algorithms import middle_exchange, route

from conftest import oes_reference


def test_sweep_exhaustive_oes_n4():
    [r] = sweep("oes", [4], trials=5, seed=0, model="unit")
    depths = [oes_reference(p) for p in itertools.permutations(range(4))]
    assert r.exhaustive and r.trials == 24
    assert Fraction(r.mean).limit_denominator(1000) == Fraction(sum(depths), 24)
    assert r.min == min(depths) and r.max == max(depths)


def test_sweep_exhaustive_matches_population():
    [r] = sweep("gdc-tbs", [6], trials=1, seed=3)
    costs = [makespan(route(p, "gdc-tbs"), n=6)
             for p in itertools.permutations(range(6))]
    mean = sum(costs, Fraction(0)) / len(costs)
    assert r.mean == float(mean)
    assert r.std == pytest.approx(math.sqrt(sum((c - mean) ** 2 for c in costs) / len(costs)))


def test_sweep_is_deterministic_and_well_formed():
    a = sweep("gdc-tbs", [16, 32], trials=20, seed=11)
    b = sweep("gdc-tbs", [16, 32], trials=20, seed=11)
    assert a == b
    assert write_sweep_csv(a) == write_sweep_csv(b)
    for r in a:
        assert r.trials == 20 and r.std >= 0 and r.min <= r.mean <= r.max
    assert sweep("gdc-tbs", [16], trials=20, seed=12) != a[:1]


def test_sweep_rejects_bad_input():
    with pytest.raises(ValueError):
        sweep("oes", [16], trials=0, seed=1)
    with pytest.raises(ValueError):
        sweep("quick", [16], trials=1, seed=1)


def test_csv_round_trip():
    rows = sweep("oes", [12, 20], trials=5, seed=2)
    text = write_sweep_csv(rows)
    assert text.splitlines()[0] == "algorithm,n,trials,seed,mean,std,min,max"
    back = read_sweep_csv(text)
    assert [(r.n, r.mean, r.std) for r in back] == [(r.n, r.mean, r.std) for r in rows]
    with pytest.raises(ValueError):
        read_sweep_csv("algorithm,n\noes,3\n")
    with pytest.raises(ValueError):
        read_sweep_csv(text.replace("oes,12", "oes,twelve"))


def test_fit_recovers_exact_model():
    pts = [(n, 1.0 * n) for n in (16, 32, 64, 128, 256)]
    fit = fit_mu(pts)
    assert fit.a == pytest.approx(1, abs=1e-9)
    assert fit.b == pytest.approx(0, abs=1e-9) and fit.c == pytest.approx(0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    pts = [(n, 0.6 * n - 2 * math.sqrt(n) + 5) for n in (10, 20, 40, 80)]
    fit = fit_mu(pts)
    assert (fit.a, fit.b, fit.c) == pytest.approx((0.6, -2, 5), abs=1e-9)
    assert json.loads(fit.to_json()).keys() == {"a", "b", "c", "r_squared"}


def test_fit_residuals_orthogonal_to_basis():
    rng = np.random.default_rng(0)
    ns = np.array([16, 23, 32, 45, 64, 91, 128])
    ys = 0.7 * ns + rng.normal(0, 2, len(ns))
    fit = fit_mu(list(zip(ns, ys)))
    resid = ys - fit.predict(ns)
    basis = np.column_stack([ns, np.sqrt(ns), np.ones(len(ns))])
    assert np.abs(basis.T @ resid).max() < 1e-8 * np.abs(basis.T @ ys).max()


def test_fit_sigma_uses_variance():
    pts = [(n, math.sqrt(n)) for n in (16, 32, 64, 128)]
    fit = fit_sigma(pts)
    assert fit.a == pytest.approx(1, abs=1e-9) and fit.r_squared == pytest.approx(1)
    rows = [SweepResult("oes", n, 10, 0, 0.0, math.sqrt(n), 0.0, 0.0) for n in (4, 9, 16)]
    assert fit_sigma(rows).a == pytest.approx(1, abs=1e-9)


def test_fit_errors():
    with pytest.raises(FitError):
        fit_mu([(10, 1), (10, 2), (10, 3)])
    with pytest.raises(FitError):
        fit_mu([(10, 1), (20, 2)])
    with pytest.raises(FitError):
        fit_mu([])


def test_oes_normalized_deviation_shrinks():
    rows = sweep("oes", [32, 64, 128, 256], trials=200, seed=4)
    x = np.log([r.n for r in rows])
    y = np.log([r.std / r.n for r in rows])
    slope = np.polyfit(x, y, 1)[0]
    assert -0.8 < slope < -0.3


def test_bitization_examples():
    rep = bitization_check(4, 100_000, seed=1)
    assert rep["categories"] == 6 and rep["p_value"] > 0.001
    rep = bitization_check(2, 20_000, seed=2)
    assert rep["categories"] == 2
    sigma = math.sqrt(0.25 / 20_000)
    assert rep["max_frequency_deviation"] <= 3 * sigma
    rep = bitization_check(6, 50_000, seed=3)
    assert rep["expected_frequency"] == pytest.approx(1 / math.comb(6, 3))
    assert rep["max_frequency_deviation"] < 0.01
    with pytest.raises(ValueError):
        bitization_check(5, 100, seed=1)


def test_expect_max_examples():
    rep = expect_max_check(100, 1, 0.5, 20_000, seed=1)
    assert rep["mean"] == pytest.approx(50, abs=4 * rep["stderr"])
    assert expect_max_check(50, 10, 0.0, 100, seed=1)["mean"] == 0
    rep = expect_max_check(729, 243, 0.5, 10_000, seed=2)
    assert rep["holds"] and rep["mean"] <= 729 / 2 + 2 * math.sqrt(729 * math.log(729 * 243))
    with pytest.raises(ValueError):
        expect_max_check(10, 0, 0.5, 10, seed=1)


def test_sparse_permutation():
    rng = np.random.default_rng(0)
    for k in (0, 2, 3, 6):
        p = sparse_permutation(20, k, rng)
        assert sorted(p) == list(range(20))
        assert sum(1 for i, v in enumerate(p) if i != v) == k
    with pytest.raises(ValueError):
        sparse_permutation(5, 6, rng)
    with pytest.raises(ValueError):
        sparse_permutation(5, 1, rng)


def test_sparse_envelope_examples():
    rows = sparse_envelope(0, [16, 64], trials=3, seed=1)
    assert all(r["max_excess"] == 0 and r["mean_excess"] == 0 for r in rows)
    with pytest.raises(ValueError):
        sparse_envelope(4, [3], trials=1, seed=1)


def test_adjacent_pair_excess_bounded():
    # a single adjacent transposition anywhere costs n/3 plus a constant at most
    worst = []
    for n in (32, 128, 512):
        ex = 0.0
        for x in range(0, n - 1, max(1, n // 16)):
            p = list(range(n))
            p[x], p[x + 1] = x + 1, x
            ex = max(ex, float(makespan(middle_exchange(p), n=n)) - n / 3)
        worst.append(ex)
    assert max(worst) <= 3


def test_sparse_envelope_k4_not_diverging():
    rows = sparse_envelope(4, [64, 256, 1024], trials=60, seed=5)
    maxes = [r["max_excess"] for r in rows]
    assert maxes[-1] <= maxes[0] + 16
