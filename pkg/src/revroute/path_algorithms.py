"""Routing algorithms on the path graph.

* :func:`odd_even_sort` -- SWAP-only baseline (matching rounds).
* :func:`gdc` -- divide and conquer: label tokens by destination half, sort
  the labels with a binary sorter, recurse on both halves.
* :func:`tbs` / :func:`atbs` -- binary sorters built from reversals.
* :func:`middle_exchange` -- sparse permutations in ``n/3 + O(k^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numba
import numpy as np

from .core import (Matching, Reversal, ScheduleError, apply_sequence, binary_label,
                   check_bits, check_permutation, is_sorted)

__all__ = [
    "odd_even_sort", "gdc", "tbs", "atbs", "atbs_table", "atbs_cost", "middle_exchange",
    "tbs_split", "MergeNode", "tbs_merge_tree", "SparseSpec", "sparse_spec",
    "ALGORITHMS", "route",
]

BinarySorter = Callable[[Sequence[int]], list]


def odd_even_sort(perm: Sequence[int], offset: int = 0) -> list[Matching]:
    """Odd-even transposition sort as a list of non-empty matching rounds.

    Rounds alternate between pairs ``(0,1), (2,3), ...`` and ``(1,2), (3,4), ...``;
    a pair swaps when the left token is bound further right.  Stops once a
    full even+odd pass changes nothing, so the identity yields no rounds.
    """
    arr = np.asarray(check_permutation(perm), dtype=np.int64)
    n = len(arr)
    rounds = []
    parity, quiet = 0, 0
    while quiet < 2 and n > 1:
        left = np.arange(parity, n - 1, 2)
        hits = left[arr[left] > arr[left + 1]]
        if hits.size:
            arr[hits], arr[hits + 1] = arr[hits + 1], arr[hits].copy()
            rounds.append(Matching(tuple((int(p) + offset, int(p) + 1 + offset) for p in hits)))
            quiet = 0
        else:
            quiet += 1
        parity ^= 1
    return rounds


# -- binary sorters ---------------------------------------------------------

def tbs_split(n: int) -> tuple[int, int]:
    """Section boundaries ``(a, c)``: thirds are ``[0,a)``, ``[a,c)``, ``[c,n)``."""
    return -(-n // 3), -(-2 * n // 3)


def _merge_bounds(bits, lo, a, c, hi, flip):
    """Merge reversal for sections [lo,a), [a,c), [c,hi] once each is sorted.

    Outer sections are sorted ascending and the middle descending (relative
    to ``flip``).  Returns ``(first_one, last_zero)`` or ``None`` if the
    concatenation is already sorted.
    """
    def ones(x, y):
        s = sum(bits[x:y])
        return (y - x) - s if flip else s

    l_ones = ones(lo, a)
    m_ones = ones(a, c)
    r_ones = ones(c, hi + 1)
    l_zeros = (a - lo) - l_ones
    m_zeros = (c - a) - m_ones
    r_zeros = (hi + 1 - c) - r_ones
    if l_ones + m_ones == 0 or m_zeros + r_zeros == 0:
        return None
    first_one = lo + l_zeros if l_ones else a
    last_zero = hi - r_ones if r_zeros else c - 1
    return first_one, last_zero


@dataclass
class MergeNode:
    """One TBS call: its merge length (0 when no merge) and the three sub-calls."""

    length: int
    children: list["MergeNode"] = field(default_factory=list)

    def cost_thirds(self) -> int:
        """Recursive cost in thirds: slowest child plus this merge."""
        sub = max((c.cost_thirds() for c in self.children), default=0)
        return sub + (self.length + 1 if self.length else 0)


def _tbs(bits, lo, hi, flip, out, tree: MergeNode | None):
    n = hi - lo + 1
    if n <= 1:
        return
    a, c = tbs_split(n)
    a += lo
    c += lo
    for s_lo, s_hi, s_flip in ((lo, a - 1, flip), (a, c - 1, not flip), (c, hi, flip)):
        child = None
        if tree is not None:
            child = MergeNode(0)
            tree.children.append(child)
        if s_hi >= s_lo:
            _tbs(bits, s_lo, s_hi, s_flip, out, child)
    merge = _merge_bounds(bits, lo, a, c, hi, flip)
    if merge is not None:
        out.append(Reversal(*merge))
        if tree is not None:
            tree.length = merge[1] - merge[0] + 1


def tbs(bits) -> list[Reversal]:
    """Tripartite binary sort: sort thirds (middle one backwards), merge with one reversal."""
    bits = check_bits(bits)
    out: list[Reversal] = []
    _tbs(bits, 0, len(bits) - 1, False, out, None)
    return out


def tbs_merge_tree(bits) -> MergeNode:
    """The recursion tree of :func:`tbs` annotated with merge lengths."""
    bits = check_bits(bits)
    root = MergeNode(0)
    _tbs(bits, 0, len(bits) - 1, False, [], root)
    return root


@numba.njit(cache=True)
def _atbs_kernel(bits):
    n = bits.shape[0]
    pre = np.zeros(n + 1, dtype=np.int64)
    for k in range(n):
        pre[k + 1] = pre[k] + bits[k]
    big = np.int64(1) << 40
    cost = np.zeros((2, n, n), dtype=np.int64)
    # cost_t[o, hi, lo] mirrors cost[o, lo, hi] so the inner loop reads contiguously
    cost_t = np.zeros((2, n, n), dtype=np.int64)
    best_i = np.full((2, n, n), -1, dtype=np.int64)
    best_j = np.full((2, n, n), -1, dtype=np.int64)
    for length in range(2, n + 1):
        for lo in range(0, n - length + 1):
            hi = lo + length - 1
            for o in range(2):
                best = big
                bi = -1
                bj = -1
                right = cost_t[o, hi]
                for i in range(lo, hi):
                    c0 = cost[o, lo, i]
                    if c0 >= best:
                        continue
                    mid = cost[1 - o, i + 1]
                    l_ones = pre[i + 1] - pre[lo]
                    if o == 1:
                        l_ones = (i + 1 - lo) - l_ones
                    for j in range(i, hi):
                        c2 = right[j + 1]
                        m = c0 if c0 > c2 else c2
                        if j > i:
                            c1 = mid[j]
                            if c1 > m:
                                m = c1
                        if m >= best:
                            continue
                        m_ones = pre[j + 1] - pre[i + 1]
                        r_ones = pre[hi + 1] - pre[j + 1]
                        if o == 1:
                            m_ones = (j - i) - m_ones
                            r_ones = (hi - j) - r_ones
                        m_zeros = (j - i) - m_ones
                        r_zeros = (hi - j) - r_ones
                        r = 0
                        if l_ones + m_ones > 0 and m_zeros + r_zeros > 0:
                            r = l_ones + (j - i) + r_zeros + 1
                        total = m + r
                        if total < best:
                            best = total
                            bi = i
                            bj = j
                cost[o, lo, hi] = best
                cost_t[o, hi, lo] = best
                best_i[o, lo, hi] = bi
                best_j[o, lo, hi] = bj
    return cost, best_i, best_j


def atbs_table(bits):
    """Dynamic-programming tables for adaptive TBS.

    Returns ``(cost, best_i, best_j)`` indexed ``[orientation, lo, hi]``;
    orientation 1 sorts the segment descending.  Costs are in thirds of a
    SWAP time under the linear model.
    """
    arr = np.asarray(check_bits(bits), dtype=np.int64)
    return _atbs_kernel(arr)


def atbs(bits) -> list[Reversal]:
    """Adaptive TBS: the cheapest pair of partition points at every level.

    Every split ``[0,i] [i+1,j] [j+1,n-1]`` with ``0 <= i <= j < n-1`` is tried
    (``i == j`` leaves no middle section).  Ties go to the smallest ``i``, then
    the smallest ``j``.  Costs are measured with the linear model.
    """
    bits = check_bits(bits)
    n = len(bits)
    if n <= 1:
        return []
    _, best_i, best_j = atbs_table(bits)
    out: list[Reversal] = []

    def build(lo, hi, o):
        if hi <= lo:
            return
        i, j = int(best_i[o, lo, hi]), int(best_j[o, lo, hi])
        build(lo, i, o)
        build(i + 1, j, 1 - o)
        build(j + 1, hi, o)
        merge = _merge_bounds(bits, lo, i + 1, j + 1, hi, bool(o))
        if merge is not None:
            out.append(Reversal(*merge))

    build(0, n - 1, 0)
    return out


def atbs_cost(bits) -> Fraction:
    bits = check_bits(bits)
    if len(bits) <= 1:
        return Fraction(0)
    cost, _, _ = atbs_table(bits)
    return Fraction(int(cost[0, 0, len(bits) - 1]), 3)


# -- divide and conquer -----------------------------------------------------

def gdc(perm: Sequence[int], sorter: BinarySorter = tbs) -> list[Reversal]:
    """Route ``perm`` by recursive halving with a reversal-based binary sorter.

    Each segment's tokens are labelled by destination half, the labels are
    sorted with ``sorter``, then both halves recurse.  The left half gets
    ``len // 2`` positions.  Segments whose labels are already split are not
    handed to the sorter.
    """
    arr = list(check_permutation(perm))
    ops: list[Reversal] = []

    def rec(lo, hi):
        if hi - lo + 1 <= 1:
            return
        bits = binary_label(arr, lo, hi)
        local = [] if list(bits) == sorted(bits) else sorter(bits)
        shifted = [Reversal(r.lo + lo, r.hi + lo) for r in local]
        for r in shifted:
            arr[r.lo:r.hi + 1] = arr[r.lo:r.hi + 1][::-1]
        split = lo + (hi - lo + 1) // 2
        if any(v >= split for v in arr[lo:split]):
            raise ScheduleError(f"binary sorter failed to sort {bits}")
        ops.extend(shifted)
        rec(lo, split - 1)
        rec(split, hi)

    rec(0, len(arr) - 1)
    return ops


# -- sparse permutations ----------------------------------------------------

@dataclass(frozen=True)
class SparseSpec:
    n: int
    movers: tuple[int, ...]
    t: int  # movers at or left of the median

    @property
    def k(self) -> int:
        return len(self.movers)


def sparse_spec(perm: Sequence[int]) -> SparseSpec:
    perm = check_permutation(perm)
    n = len(perm)
    movers = tuple(x for x in range(n) if perm[x] != x)
    median = n // 2 - 1
    return SparseSpec(n, movers, sum(1 for x in movers if x <= median))


def middle_exchange_phases(perm: Sequence[int]):
    """Compression, inner and dilation operation lists for :func:`middle_exchange`."""
    perm = check_permutation(perm)
    spec = sparse_spec(perm)
    n, xs, t, k = spec.n, spec.movers, spec.t, spec.k
    if k == 0:
        return [], [], []
    median = n // 2 - 1
    comp: list[Reversal] = []
    # left movers: grow a block that ends at the next mover, then park it at the median
    for i in range(t - 1):
        if xs[i + 1] - xs[i] > 1:
            comp.append(Reversal(xs[i] - i, xs[i + 1] - 1))
    if t and xs[t - 1] < median:
        comp.append(Reversal(xs[t - 1] - t + 1, median))
    # right movers, mirrored
    for j in range(k - 1, t, -1):
        if xs[j] - xs[j - 1] > 1:
            comp.append(Reversal(xs[j - 1] + 1, xs[j] + (k - 1 - j)))
    if t < k and xs[t] > median + 1:
        comp.append(Reversal(median + 1, xs[t] + (k - 1 - t)))

    origin = apply_sequence(range(n), comp)  # origin[p]: start position of token now at p
    where = [0] * n
    for p, x in enumerate(origin):
        where[x] = p
    start = median - t + 1
    local = [where[perm[origin[p]]] - start for p in range(start, start + k)]
    inner = odd_even_sort(local, offset=start)
    return comp, inner, comp[::-1]


def middle_exchange(perm: Sequence[int]) -> list:
    """Gather the movers next to the median, permute them there, send them back out."""
    comp, inner, dil = middle_exchange_phases(perm)
    return comp + inner + dil


# -- dispatch ----------------------------------------------------------------

def _gdc_tbs(perm):
    return gdc(perm, tbs)


def _gdc_atbs(perm):
    return gdc(perm, atbs)


ALGORITHMS: dict[str, Callable[[Sequence[int]], list]] = {
    "oes": odd_even_sort,
    "gdc-tbs": _gdc_tbs,
    "gdc-atbs": _gdc_atbs,
    "middle-exchange": middle_exchange,
}


def route(perm: Sequence[int], algorithm: str = "gdc-tbs", verify: bool = True) -> list:
    """Run a path router by name and (optionally) check its schedule sorts ``perm``."""
    try:
        algo = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}") from None
    perm = check_permutation(perm)
    ops = algo(perm)
    if verify and not is_sorted(apply_sequence(perm, ops)):
        raise ScheduleError(f"{algorithm} failed to route {list(perm)}")
    return ops
