"""Average-case sweeps, curve fits and statistical property checks.

Randomness comes from numpy's PCG64.  Trial ``t`` at length ``n`` of a sweep
seeded with ``seed`` draws from ``default_rng([seed, n, t])``, so any single
trial can be replayed on its own and results do not depend on execution
order.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .core import CostModel, makespan
from .path_algorithms import ALGORITHMS, route

__all__ = [
    "DEFAULT_N_GRID", "ATBS_MAX_N", "EXHAUSTIVE_BELOW", "FitError",
    "SweepResult", "FitResult", "sweep", "sweep_costs", "write_sweep_csv", "read_sweep_csv",
    "fit_mu", "fit_sigma", "fit_basis", "bitization_check", "expect_max_check",
    "sparse_permutation", "sparse_envelope", "trial_rng",
]

DEFAULT_N_GRID = (16, 23, 32, 45, 64, 91, 128, 181, 256, 362, 512)
ATBS_MAX_N = 207
EXHAUSTIVE_BELOW = 12
CSV_COLUMNS = ("algorithm", "n", "trials", "seed", "mean", "std", "min", "max")


class FitError(ValueError):
    pass


def trial_rng(seed: int, n: int, t: int) -> np.random.Generator:
    return np.random.default_rng([seed, n, t])


@dataclass(frozen=True)
class SweepResult:
    algorithm: str
    n: int
    trials: int
    seed: int
    mean: float
    std: float
    min: float
    max: float
    exhaustive: bool = False


def _to_float(cost) -> float:
    return float(cost)


def sweep_costs(algorithm: str, n: int, trials: int, seed: int, model="linear",
                exhaustive_below: int = EXHAUSTIVE_BELOW):
    """Makespans for one grid point, plus whether the whole of S_n was enumerated."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    model = CostModel.coerce(model)
    if n < exhaustive_below:
        perms = itertools.permutations(range(n))
        exhaustive = True
    else:
        perms = (tuple(int(v) for v in trial_rng(seed, n, t).permutation(n)) for t in range(trials))
        exhaustive = False
    costs = [makespan(route(p, algorithm), model, n=n) for p in perms]
    return costs, exhaustive


def sweep(algorithm: str, n_grid: Iterable[int] = DEFAULT_N_GRID, trials: int = 1000,
          seed: int = 0, model="linear", exhaustive_below: int = EXHAUSTIVE_BELOW) -> list[SweepResult]:
    """Mean, population standard deviation and range of the makespan for each ``n``.

    Lengths below ``exhaustive_below`` are enumerated instead of sampled, in
    which case ``trials`` records the population size.
    """
    out = []
    for n in n_grid:
        costs, exhaustive = sweep_costs(algorithm, n, trials, seed, model, exhaustive_below)
        if costs and isinstance(costs[0], Fraction):
            mean_q = sum(costs, Fraction(0)) / len(costs)
            var_q = sum(((c - mean_q) ** 2 for c in costs), Fraction(0)) / len(costs)
            mean, std = float(mean_q), math.sqrt(var_q)
        else:
            xs = [_to_float(c) for c in costs]
            mean = math.fsum(xs) / len(xs)
            std = math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / len(xs))
        out.append(SweepResult(algorithm, int(n), len(costs), int(seed), mean, std,
                               float(min(costs)), float(max(costs)), exhaustive))
    return out


def write_sweep_csv(results: Sequence[SweepResult], fh=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow([r.algorithm, r.n, r.trials, r.seed, repr(r.mean), repr(r.std),
                    repr(r.min), repr(r.max)])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def read_sweep_csv(text: str) -> list[SweepResult]:
    """Parse sweep CSV text; raises ``ValueError`` on missing columns or bad values."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not set(CSV_COLUMNS) <= set(reader.fieldnames):
        raise ValueError(f"sweep CSV needs columns {','.join(CSV_COLUMNS)}")
    out = []
    for i, row in enumerate(reader, start=2):
        try:
            out.append(SweepResult(row["algorithm"], int(row["n"]), int(row["trials"]),
                                   int(row["seed"]), float(row["mean"]), float(row["std"]),
                                   float(row["min"]), float(row["max"])))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"malformed sweep CSV at line {i}: {exc}") from None
    return out


# -- fits ------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    c: float
    r_squared: float

    def predict(self, n):
        n = np.asarray(n, dtype=float)
        return self.a * n + self.b * np.sqrt(n) + self.c

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _design(ns) -> np.ndarray:
    ns = np.asarray(ns, dtype=float)
    return np.column_stack([ns, np.sqrt(ns), np.ones_like(ns)])


def fit_basis(ns: Sequence[float], ys: Sequence[float]) -> FitResult:
    """Least squares for ``y = a n + b sqrt(n) + c``."""
    ns = np.asarray(ns, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if ns.shape != ys.shape or ns.ndim != 1:
        raise FitError("need matching 1-D sequences of n and y")
    if len(np.unique(ns)) < 3:
        raise FitError("need at least three distinct n values")
    X = _design(ns)
    if np.linalg.matrix_rank(X) < 3:
        raise FitError("design matrix is rank deficient")
    coef, *_ = np.linalg.lstsq(X, ys, rcond=None)
    resid = ys - X @ coef
    ss_res = float(resid @ resid)
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
    else:
        r2 = max(0.0, 1.0 - ss_res / ss_tot)
    a, b, c = (float(v) for v in coef)
    return FitResult(a, b, c, r2)


def _split_points(points):
    pts = [(float(p[0]), float(p[1])) for p in points]
    if not pts:
        raise FitError("no points to fit")
    ns, ys = zip(*pts)
    return ns, ys


def fit_mu(points) -> FitResult:
    """Fit mean makespans; ``points`` holds ``(n, mean)`` pairs or :class:`SweepResult` rows."""
    pts = [(p.n, p.mean) if isinstance(p, SweepResult) else p for p in points]
    return fit_basis(*_split_points(pts))


def fit_sigma(points) -> FitResult:
    """Fit variances; ``points`` holds ``(n, std)`` pairs or :class:`SweepResult` rows."""
    pts = [(p.n, p.std) if isinstance(p, SweepResult) else p for p in points]
    ns, sd = _split_points(pts)
    return fit_basis(ns, [s * s for s in sd])


# -- statistical checks ------------------------------------------------------

def bitization_check(n: int, samples: int, seed) -> dict:
    """Chi-square test that the half-labels of a uniform permutation are uniform over balanced strings."""
    if n % 2 or n < 2:
        raise ValueError("bitization needs an even length")
    if n > 12:
        raise ValueError("bitization check enumerates categories; n must be <= 12")
    rng = np.random.default_rng(seed)
    half = n // 2
    balanced = [c for c in itertools.combinations(range(n), half)]
    index = {}
    weights = 1 << np.arange(n)
    for ones in balanced:
        index[int(sum(1 << i for i in ones))] = len(index)
    perms = np.argsort(rng.random((samples, n)), axis=1)
    codes = ((perms >= half).astype(np.int64) * weights).sum(axis=1)
    observed = np.zeros(len(balanced), dtype=np.int64)
    uniq, cnt = np.unique(codes, return_counts=True)
    for code, c in zip(uniq, cnt):
        observed[index[int(code)]] = c
    res = stats.chisquare(observed)
    return {
        "n": n, "samples": samples, "categories": len(balanced),
        "statistic": float(res.statistic), "p_value": float(res.pvalue),
        "expected_frequency": 1 / len(balanced),
        "max_frequency_deviation": float(np.abs(observed / samples - 1 / len(balanced)).max()),
    }


def expect_max_check(n: int, m: int, p: float, trials: int, seed, C: float = 2.0) -> dict:
    """Empirical mean of the largest of ``m`` Binomial(n, p) draws against ``pn + C sqrt(n log(mn))``."""
    if m < 1 or not 0 <= p <= 1 or trials < 1:
        raise ValueError("need m >= 1, 0 <= p <= 1 and trials >= 1")
    rng = np.random.default_rng(seed)
    ys = rng.binomial(n, p, size=(trials, m)).max(axis=1)
    mean = float(ys.mean())
    bound = p * n + C * math.sqrt(n * math.log(m * n)) if m * n > 1 else p * n
    return {
        "n": n, "m": m, "p": p, "trials": trials, "C": C,
        "mean": mean, "stderr": float(ys.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
        "bound": bound, "holds": mean <= bound,
    }


def sparse_permutation(n: int, k: int, rng) -> tuple[int, ...]:
    """A permutation of length ``n`` moving exactly ``k`` uniformly chosen positions."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k == 1:
        raise ValueError("a permutation cannot move exactly one element")
    perm = list(range(n))
    if k == 0:
        return tuple(perm)
    movers = rng.choice(n, size=k, replace=False)
    while True:
        dest = rng.permutation(movers)
        if np.all(dest != movers):
            break
    for src, d in zip(movers, dest):
        perm[int(src)] = int(d)
    return tuple(perm)


def sparse_envelope(k: int, n_grid: Iterable[int], trials: int, seed,
                    algorithm: str = "middle-exchange", model="linear") -> list[dict]:
    """Excess of the makespan over ``n/3`` on random ``k``-sparse permutations.

    With ``k = 0`` the schedule is empty and the excess is reported as 0.
    """
    if k < 0 or k == 1:
        raise ValueError("k must be 0 or at least 2")
    rows = []
    for n in n_grid:
        if k > n:
            raise ValueError(f"k={k} exceeds n={n}")
        excess = []
        for t in range(trials):
            perm = sparse_permutation(n, k, trial_rng(seed, n, t))
            cost = float(makespan(route(perm, algorithm), model, n=n))
            excess.append(cost - n / 3 if k else cost)
        rows.append({"n": int(n), "trials": trials, "mean_excess": math.fsum(excess) / trials,
                     "max_excess": max(excess)})
    return rows
