"""Acceptance checks, one test per criterion.

Several of these run full sweeps and take minutes; they are marked ``slow``
but are part of the default run. Each test prints a short summary line
(visible with ``pytest -s``).
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from revroute.core import d_infinity, is_sorted, apply_sequence, makespan
from revroute.experiments import (ATBS_MAX_N, DEFAULT_N_GRID, bitization_check, fit_mu,
                                  sparse_envelope, sparse_permutation, sweep, trial_rng)
from revroute.graph_algorithms import graph_center, grid_graph, route_sparse_general
from revroute.oracle import ball_count, brute_force_min_time, exhaustive_verify
from revroute.path_algorithms import ALGORITHMS, atbs, gdc, odd_even_sort, tbs

from conftest import dag_makespan, tbs_recursion_thirds

SEED = 20240501


def test_criterion_01_exhaustive_correctness():
    for algo in ("oes", "gdc-tbs", "gdc-atbs", "middle-exchange"):
        for n in range(1, 9):
            rep = exhaustive_verify(n, algo)
            assert rep.all_correct, (algo, n, rep.failures)
            assert rep.count == math.factorial(n)
        print(f"{algo}: n<=8 all correct, max cost at n=8 {rep.max_cost}")


def test_criterion_02_atbs_dominates_tbs():
    """Exact comparison of the two divide-and-conquer variants.

    Expected to fail: an ATBS split that is cheaper for the top-level binary
    string can leave the halves less sorted than the fixed split does.
    Smallest witness: (2, 0, 1, 3).
    """
    violations = []
    checked = 0

    def compare(p):
        nonlocal checked
        checked += 1
        t = makespan(gdc(p, tbs), n=len(p))
        a = makespan(gdc(p, atbs), n=len(p))
        if a > t:
            violations.append((len(p), a - t, p))

    for n in range(1, 9):
        for p in itertools.permutations(range(n)):
            compare(p)
    for n in (16, 64, 128):
        for t in range(1000):
            compare(tuple(int(x) for x in trial_rng(SEED, n, t).permutation(n)))
    by_n = {}
    for n, _, _ in violations:
        by_n[n] = by_n.get(n, 0) + 1
    print(f"checked {checked}, violations {len(violations)} by n {by_n}")
    assert not violations, f"{len(violations)} violations, first {violations[:3]}"


@pytest.mark.slow
def test_criterion_03_average_case_fits():
    grids = {
        "oes": DEFAULT_N_GRID,
        "gdc-tbs": DEFAULT_N_GRID,
        "gdc-atbs": tuple(n for n in DEFAULT_N_GRID if n <= ATBS_MAX_N),
    }
    bands = {"oes": (0.97, 1.01), "gdc-tbs": (0.63, 0.69), "gdc-atbs": (0.62, 0.68)}
    fits = {}
    for algo, grid in grids.items():
        fits[algo] = fit_mu(sweep(algo, grid, trials=1000, seed=SEED))
        print(f"{algo}: {fits[algo]}")
    for algo, (lo, hi) in bands.items():
        f = fits[algo]
        assert lo <= f.a <= hi, (algo, f)
        assert f.r_squared >= 0.999, (algo, f)


@pytest.mark.slow
def test_criterion_04_swap_lower_bound():
    for n in range(1, 8):
        for p in itertools.permutations(range(n)):
            assert makespan(odd_even_sort(p), "unit", n=n) >= d_infinity(p)
    n = 512
    ratios = []
    for t in range(1000):
        p = tuple(int(x) for x in trial_rng(SEED, n, t).permutation(n))
        d = d_infinity(p)
        assert makespan(odd_even_sort(p), "unit", n=n) >= d
        ratios.append(d / n)
    mean = float(np.mean(ratios))
    print(f"mean d_inf/n at n=512: {mean:.4f}")
    assert mean >= 0.95


@pytest.mark.slow
def test_criterion_05_sparse_path_envelope():
    rows = sparse_envelope(4, [256, 1024], trials=200, seed=SEED)
    small, large = rows[0]["max_excess"], rows[1]["max_excess"]
    print(f"k=4 max excess: n=256 {small:.4f}, n=1024 {large:.4f}")
    assert large <= small + 0.1 * abs(small)


@pytest.mark.slow
def test_criterion_06_general_graph_envelope():
    """C is fitted on the two smaller grids and must also cover the largest."""
    ratios = {}
    for side in (4, 8, 16):
        g = grid_graph(side, side)
        n = side * side
        center, r = graph_center(g)
        worst = Fraction(0)
        for t in range(500):
            rng = trial_rng(SEED, n, t)
            k = int(rng.integers(2, 5))
            perm = sparse_permutation(n, k, rng)
            ops = route_sparse_general(g, perm, center=center)
            assert is_sorted(apply_sequence(perm, ops)), (side, perm)
            worst = max(worst, (makespan(ops, n=n) - Fraction(2 * r, 3)) / k ** 2)
        ratios[side] = worst
    C = max(ratios[4], ratios[8])
    print(f"per-grid (cost - 2r/3)/k^2 maxima { {s: str(v) for s, v in ratios.items()} }; C = {C}")
    assert ratios[16] <= C


def test_criterion_07_ball_bound():
    assert ball_count(1, 4).exact_count == 5
    bad = [(k, n) for n in range(2, 9) for k in range(1, n) if not ball_count(k, n).within_bound]
    assert not bad


def test_criterion_08_bitization():
    for n in (4, 8):
        rep = bitization_check(n, 100_000, seed=SEED + n)
        print(f"n={n}: chi2 {rep['statistic']:.2f}, p {rep['p_value']:.4f}")
        assert rep["p_value"] > 0.001


def test_criterion_09_tbs_recursion_cross_check():
    for n in (27, 81, 243):
        for t in range(1000):
            bits = tuple(int(x) for x in trial_rng(SEED, n, t).integers(0, 2, n))
            ops = tbs(bits)
            ms = makespan(ops, n=n)
            assert ms * 3 == tbs_recursion_thirds(bits)[0], bits
            if t < 50:
                assert ms == dag_makespan(ops)


def test_criterion_10_brute_force_dominance():
    for n in range(1, 6):
        for p in itertools.permutations(range(n)):
            best = brute_force_min_time(p)
            assert best is not None
            for algo in ALGORITHMS:
                assert best <= makespan(ALGORITHMS[algo](p), n=n), (p, algo)
    assert brute_force_min_time((3, 2, 1, 0)) == pytest.approx(5 / 3)
    assert str(brute_force_min_time((3, 2, 1, 0))) == "5/3"
