"""Independent reference implementations used as test oracles.

None of these call into the package's schedulers or sorters; they recompute
the quantity of interest from first principles.
"""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from revroute.core import Matching, Reversal


def _support(op):
    if isinstance(op, Reversal):
        return set(range(op.lo, op.hi + 1))
    if isinstance(op, Matching):
        return {x for s in op.swaps for x in s}
    return set(op.path)


def _length(op):
    if isinstance(op, Reversal):
        return op.hi - op.lo + 1
    return len(op.path)


def _dur(op, model):
    if isinstance(op, Matching):
        return Fraction(1) if model != "sqrt" else 1.0
    ell = _length(op)
    if model == "linear":
        return Fraction(ell + 1, 3)
    if model == "unit":
        assert ell <= 2
        return Fraction(1)
    return math.sqrt((ell + 1) ** 2 - ell % 2) / 3


def dag_makespan(ops, model="linear"):
    """Longest path through the "earlier op shares a position" dependency DAG."""
    ops = [op for op in ops if not (isinstance(op, Matching) and not op.swaps)
           and (isinstance(op, Matching) or _length(op) > 1)]
    finish = []
    sups = [_support(op) for op in ops]
    for i, op in enumerate(ops):
        start = max((finish[j] for j in range(i) if sups[j] & sups[i]), default=0)
        finish.append(start + _dur(op, model))
    return max(finish, default=Fraction(0) if model != "sqrt" else 0.0)


def oes_reference(perm):
    """Plain-loop odd-even transposition sort; returns the number of non-empty rounds."""
    a = list(perm)
    n = len(a)
    rounds, parity, quiet = 0, 0, 0
    while quiet < 2 and n > 1:
        swapped = False
        for p in range(parity, n - 1, 2):
            if a[p] > a[p + 1]:
                a[p], a[p + 1] = a[p + 1], a[p]
                swapped = True
        if swapped:
            rounds += 1
            quiet = 0
        else:
            quiet += 1
        parity ^= 1
    assert a == sorted(a)
    return rounds


def tbs_recursion_thirds(bits, flip=False):
    """Cost in thirds of the three-way sort recursion, merging on materialized strings.

    Returns ``(cost, sorted_segment)``; the segment comes back ascending, or
    descending when ``flip`` is set.
    """
    bits = list(bits)
    n = len(bits)
    if n <= 1:
        return 0, bits
    a, c = -(-n // 3), -(-2 * n // 3)
    c0, s0 = tbs_recursion_thirds(bits[:a], flip)
    c1, s1 = tbs_recursion_thirds(bits[a:c], not flip)
    c2, s2 = tbs_recursion_thirds(bits[c:], flip)
    joined = s0 + s1 + s2
    one = 0 if flip else 1
    firsts = [i for i, b in enumerate(joined) if b == one]
    lasts = [i for i, b in enumerate(joined) if b != one]
    merge = 0
    if firsts and lasts and firsts[0] < lasts[-1]:
        i, j = firsts[0], lasts[-1]
        joined[i:j + 1] = joined[i:j + 1][::-1]
        merge = j - i + 2
    return max(c0, c1, c2) + merge, joined


def tbs_level_bound_thirds(bits):
    """Level-synchronous upper bound: per level, the largest (left ones + right zeros + middle + 1)."""
    levels: dict[int, int] = {}

    def walk(seg, flip, depth):
        n = len(seg)
        if n <= 1:
            return
        a, c = -(-n // 3), -(-2 * n // 3)
        one = 0 if flip else 1
        left_ones = sum(1 for b in seg[:a] if b == one)
        right_zeros = sum(1 for b in seg[c:] if b != one)
        levels[depth] = max(levels.get(depth, 0), left_ones + right_zeros + (c - a) + 1)
        walk(seg[:a], flip, depth + 1)
        walk(seg[a:c], not flip, depth + 1)
        walk(seg[c:], flip, depth + 1)

    walk(list(bits), False, 0)
    return sum(levels.values())


@pytest.fixture
def oracle():
    class O:
        makespan = staticmethod(dag_makespan)
        oes_rounds = staticmethod(oes_reference)
        tbs_thirds = staticmethod(lambda b: tbs_recursion_thirds(b)[0])
        tbs_level_bound = staticmethod(tbs_level_bound_thirds)
    return O
