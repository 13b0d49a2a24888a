"""Ground truth for small instances.

Exhaustive verification of the path routers, a brute-force search for the
fastest reversal schedule, and the infinity-distance ball statistics
(exact counts, the analytic bound Φ(k, n) and sampled fractions).
"""

from __future__ import annotations

import functools
import heapq
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import (CostModel, Reversal, ScheduleError, apply_sequence, check_permutation,
                   d_infinity, is_sorted, makespan, op_duration)
from .path_algorithms import ALGORITHMS, route

__all__ = [
    "EXHAUSTIVE_LIMIT", "VerifyReport", "exhaustive_verify", "brute_force_min_time",
    "PhiValue", "phi_bound", "phi_branches", "BallCount", "ball_count", "ball_fraction",
    "ball_fraction_exact",
]

EXHAUSTIVE_LIMIT = 10


@dataclass
class VerifyReport:
    algorithm: str
    n: int
    model: str
    count: int
    all_correct: bool
    max_cost: object
    mean_cost: object
    argmax_perm: Optional[list]
    failures: list = field(default_factory=list)

    def to_json(self) -> str:
        d = asdict(self)
        for key in ("max_cost", "mean_cost"):
            d[key] = str(d[key]) if isinstance(d[key], Fraction) else d[key]
        return json.dumps(d)


def _verify_chunk(args):
    algorithm, model, perms = args
    out = []
    for perm in perms:
        try:
            ops = route(perm, algorithm, verify=False)
            ok = is_sorted(apply_sequence(perm, ops))
            cost = makespan(ops, model, n=len(perm)) if ok else None
        except ScheduleError:
            ok, cost = False, None
        out.append((perm, ok, cost))
    return out


def exhaustive_verify(n: int, algorithm: str, model="linear", limit: int = EXHAUSTIVE_LIMIT,
                      workers: int = 1, max_failures: int = 10) -> VerifyReport:
    """Run ``algorithm`` on every permutation of length ``n`` and check each schedule sorts.

    Permutations are visited in lexicographic order and ties for the maximum
    keep the first one, so the report does not depend on ``workers``.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if not 1 <= n <= limit:
        raise ValueError(f"n must be in 1..{limit} for exhaustive verification")
    model = CostModel.coerce(model)
    perms = list(itertools.permutations(range(n)))
    chunk = max(1, len(perms) // (8 * workers))
    jobs = [(algorithm, model, perms[i:i + chunk]) for i in range(0, len(perms), chunk)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_verify_chunk, jobs))
    else:
        results = [_verify_chunk(j) for j in jobs]

    zero = Fraction(0) if model.exact else 0.0
    best, arg, total, failures = None, None, zero, []
    for part in results:
        for perm, ok, cost in part:
            if not ok:
                if len(failures) < max_failures:
                    failures.append(list(perm))
                continue
            total += cost
            if best is None or cost > best:
                best, arg = cost, list(perm)
    if model.exact:
        mean = total / len(perms)
    else:
        mean = math.fsum(c for part in results for _, ok, c in part if ok) / len(perms)
    return VerifyReport(algorithm, n, model.value, len(perms), not failures,
                        best if best is not None else zero, mean, arg, failures)


# -- brute force --------------------------------------------------------------

def brute_force_min_time(perm: Sequence[int], model="linear", depth_budget: int | None = None,
                         state_budget: int = 2_000_000):
    """Smallest makespan of any reversal sequence that sorts ``perm``.

    Best-first search over (arrangement, per-position ready time) states,
    with a lower bound that every misplaced token still needs one reversal
    spanning its remaining distance.  Interleavings of independent reversals
    reach the same state and are merged.  Returns ``None`` when the search
    exceeds ``depth_budget`` reversals or ``state_budget`` expansions before
    proving an optimum.
    """
    perm = check_permutation(perm)
    model = CostModel.coerce(model)
    n = len(perm)
    if depth_budget is None:
        depth_budget = 2 * n
    max_len = 2 if model is CostModel.UNIT else n
    ops = [(lo, hi) for lo in range(n) for hi in range(lo + 1, min(n, lo + max_len))]
    if model.exact:
        dur = {op: 3 if model is CostModel.UNIT else op[1] - op[0] + 2 for op in ops}
        zero = 0
    else:
        dur = {op: op_duration(Reversal(*op), model) for op in ops}
        zero = 0.0
    one = min(dur.values()) if dur else zero

    def need(p, d):
        if model is CostModel.UNIT:
            return 3 * abs(d - p)
        if model.exact:
            return abs(d - p) + 2
        return one

    def bound(arr, ready):
        return max((ready[p] + need(p, d) for p, d in enumerate(arr) if d != p), default=zero)

    start = (tuple(perm), (zero,) * n)
    heap = [(bound(*start), 0, 0, start)]
    seen = {start}
    tick = 0
    while heap:
        f, _, depth, (arr, ready) = heapq.heappop(heap)
        if is_sorted(arr):
            g = max(ready) if n else zero
            return Fraction(g, 3) if model.exact else float(g)
        tick += 1
        if tick > state_budget:
            return None
        if depth >= depth_budget:
            continue
        for lo, hi in ops:
            new_arr = arr[:lo] + arr[lo:hi + 1][::-1] + arr[hi + 1:]
            finish = max(ready[lo:hi + 1]) + dur[(lo, hi)]
            new_ready = ready[:lo] + (finish,) * (hi - lo + 1) + ready[hi + 1:]
            state = (new_arr, new_ready)
            if state in seen:
                continue
            seen.add(state)
            h = max(max(new_ready), bound(new_arr, new_ready))
            heapq.heappush(heap, (h, tick, depth + 1, state))
    return None


# -- balls ------------------------------------------------------------------

@dataclass(frozen=True)
class PhiValue:
    log: float
    value: float
    branch: str


def _log_fact(m: int) -> float:
    return math.lgamma(m + 1)


def _phi_small(k: int, n: int) -> float:
    log = (n - 2 * k) / (2 * k + 1) * _log_fact(2 * k + 1)
    return log + sum(2 / i * _log_fact(i) for i in range(k + 1, 2 * k + 1))


def _phi_large(k: int, n: int) -> float:
    log = (2 * k + 2 - n) / n * _log_fact(n)
    return log + sum(2 / i * _log_fact(i) for i in range(k + 1, n))


def _wrap(log: float, branch: str) -> PhiValue:
    value = math.exp(log) if log < 709.0 else math.inf
    return PhiValue(log, value, branch)


def phi_bound(k: int, n: int) -> PhiValue:
    """Analytic upper bound on the number of permutations with d∞ ≤ k.

    The formula switches at k/n = 1/2; both pieces are evaluated with
    log-gamma so large n does not overflow.
    """
    if not 0 < k < n:
        raise ValueError(f"phi_bound needs 0 < k < n, got k={k}, n={n}")
    if 2 * k <= n:
        return _wrap(_phi_small(k, n), "small")
    return _wrap(_phi_large(k, n), "large")


def phi_branches(k: int, n: int) -> dict:
    """Every applicable branch of Φ(k, n); both when k/n is exactly 1/2."""
    if not 0 < k < n:
        raise ValueError(f"phi_bound needs 0 < k < n, got k={k}, n={n}")
    out = {}
    if 2 * k <= n:
        out["small"] = _wrap(_phi_small(k, n), "small")
    if 2 * k >= n:
        out["large"] = _wrap(_phi_large(k, n), "large")
    return out


@dataclass(frozen=True)
class BallCount:
    k: int
    n: int
    exact_count: int
    phi: float
    log_phi: float

    @property
    def within_bound(self) -> bool:
        # at k = n - 1 the bound equals n! exactly, so allow float rounding
        return math.log(self.exact_count) <= self.log_phi + 1e-9


@functools.lru_cache(maxsize=None)
def _d_inf_counts(n: int) -> list[int]:
    counts = [0] * n
    for p in itertools.permutations(range(n)):
        counts[d_infinity(p)] += 1
    return counts


def ball_count(k: int, n: int) -> BallCount:
    """Enumerate |B_{k,n}| and pair it with Φ(k, n)."""
    if n > 10:
        raise ValueError("ball enumeration is limited to n <= 10")
    counts = _d_inf_counts(n)
    exact = sum(counts[:k + 1])
    phi = phi_bound(k, n)
    return BallCount(k, n, exact, phi.value, phi.log)


def ball_fraction_exact(n: int, eps) -> Fraction:
    """Exact share of permutations with d∞ ≤ (1 − eps)·n, by enumeration."""
    eps = Fraction(eps)
    radius = (1 - eps) * n
    counts = _d_inf_counts(n)
    inside = sum(c for d, c in enumerate(counts) if d <= radius)
    return Fraction(inside, math.factorial(n))


def ball_fraction(n: int, eps, trials: int, seed) -> tuple[float, float]:
    """Monte Carlo share of uniform permutations with d∞ ≤ (1 − eps)·n, with its standard error."""
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    radius = (1 - float(eps)) * n
    idx = np.arange(n)
    hits = 0
    for _ in range(trials):
        p = rng.permutation(n)
        hits += int(np.abs(p - idx).max() <= radius)
    frac = hits / trials
    return frac, math.sqrt(frac * (1 - frac) / trials)
