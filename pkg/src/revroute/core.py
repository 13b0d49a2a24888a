"""Permutations, reversal operations, cost models and the makespan engine.

Tokens are labelled by their destination, so a permutation ``dest`` doubles as
the initial token arrangement: ``arrangement[p]`` is the destination of the
token sitting at position ``p``.  A schedule is complete when the arrangement
becomes the identity.

Durations are exact where the cost model allows it.  The linear and unit
models are evaluated in integer "thirds" of a SWAP time and returned as
:class:`fractions.Fraction`; the square-root model returns floats.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "CostModel", "Reversal", "PathReversal", "Matching", "Operation",
    "ScheduleError", "UnsupportedOperation",
    "apply_reversal", "apply_sequence", "op_duration", "makespan",
    "normalize", "binary_label", "d_infinity", "random_permutation",
    "is_sorted", "check_permutation", "check_bits",
    "schedule_to_json", "schedule_from_json", "dumps_schedule", "loads_schedule",
]


class ScheduleError(ValueError):
    """A schedule is malformed or does not do what it claims."""


class UnsupportedOperation(ScheduleError):
    """The cost model has no duration for this operation."""


class CostModel(str, enum.Enum):
    LINEAR = "linear"
    SQRT = "sqrt"
    UNIT = "unit"

    @classmethod
    def coerce(cls, model: Union["CostModel", str, None]) -> "CostModel":
        if model is None:
            return cls.LINEAR
        return cls(model)

    @property
    def exact(self) -> bool:
        return self is not CostModel.SQRT


@dataclass(frozen=True)
class Reversal:
    """Reverse the tokens on path positions ``lo..hi`` (inclusive)."""

    lo: int
    hi: int

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ScheduleError(f"bad reversal bounds ({self.lo}, {self.hi})")

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1

    @property
    def support(self) -> range:
        return range(self.lo, self.hi + 1)


@dataclass(frozen=True)
class PathReversal:
    """Reverse the tokens along a simple vertex path of a graph."""

    path: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(int(v) for v in self.path))
        if not self.path or len(set(self.path)) != len(self.path):
            raise ScheduleError(f"path reversal needs distinct vertices: {self.path}")

    @property
    def length(self) -> int:
        return len(self.path)

    @property
    def support(self) -> tuple[int, ...]:
        return self.path


@dataclass(frozen=True)
class Matching:
    """A round of simultaneous, pairwise disjoint SWAPs."""

    swaps: tuple[tuple[int, int], ...]
    support: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        swaps = tuple((int(u), int(v)) for u, v in self.swaps)
        object.__setattr__(self, "swaps", swaps)
        support = tuple(x for pair in swaps for x in pair)
        if len(set(support)) != len(support) or any(u == v for u, v in swaps):
            raise ScheduleError(f"overlapping swaps in matching round: {swaps}")
        object.__setattr__(self, "support", support)


Operation = Union[Reversal, PathReversal, Matching]


def check_permutation(perm: Iterable[int]) -> tuple[int, ...]:
    """Return ``perm`` as a tuple of ints, raising ``ValueError`` unless it is a bijection."""
    values = tuple(int(v) for v in np.asarray(list(perm)).ravel())
    n = len(values)
    if n < 1:
        raise ValueError("permutation must have at least one element")
    if sorted(values) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {list(values)}")
    return values


def check_bits(bits: Union[str, Iterable[int]]) -> tuple[int, ...]:
    if isinstance(bits, str):
        if any(c not in "01" for c in bits):
            raise ValueError(f"bit string may only contain 0 and 1: {bits!r}")
        return tuple(int(c) for c in bits)
    values = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in values):
        raise ValueError(f"bits must be 0 or 1: {values}")
    return values


def is_sorted(arrangement: Sequence[int]) -> bool:
    return all(v == i for i, v in enumerate(arrangement))


def _check_bounds(op: Operation, n: int) -> None:
    if isinstance(op, Reversal):
        low, top = op.lo, op.hi
    elif op.support:
        low, top = min(op.support), max(op.support)
    else:
        return
    if low < 0 or top >= n:
        raise ScheduleError(f"{op} is out of bounds for {n} positions")


def _apply_inplace(arr: list, op: Operation) -> None:
    if isinstance(op, Reversal):
        arr[op.lo:op.hi + 1] = arr[op.lo:op.hi + 1][::-1]
    elif isinstance(op, PathReversal):
        vals = [arr[v] for v in op.path]
        for v, x in zip(op.path, reversed(vals)):
            arr[v] = x
    else:
        for u, v in op.swaps:
            arr[u], arr[v] = arr[v], arr[u]


def apply_reversal(arrangement: Sequence, rev: Operation) -> list:
    arr = list(arrangement)
    _check_bounds(rev, len(arr))
    _apply_inplace(arr, rev)
    return arr


def apply_sequence(arrangement: Sequence, ops: Iterable[Operation]) -> list:
    """Apply ``ops`` left to right; matching rounds swap all their pairs at once."""
    arr = list(arrangement)
    n = len(arr)
    for op in ops:
        _check_bounds(op, n)
        _apply_inplace(arr, op)
    return arr


def _thirds(op: Operation, model: CostModel) -> int:
    if isinstance(op, Matching):
        return 3
    length = op.length
    if model is CostModel.UNIT:
        if length > 2:
            raise UnsupportedOperation(f"unit-swap model cannot time a length-{length} reversal")
        return 3
    return length + 1


def _sqrt_duration(length: int) -> float:
    return math.sqrt((length + 1) ** 2 - (length % 2)) / 3


def op_duration(op: Operation, model: Union[CostModel, str] = CostModel.LINEAR):
    """Duration of one operation in SWAP times.

    A matching round always costs 1 however many swaps it holds.
    """
    model = CostModel.coerce(model)
    if model is CostModel.SQRT:
        if isinstance(op, Matching):
            return 1.0
        return _sqrt_duration(op.length)
    return Fraction(_thirds(op, model), 3)


def normalize(ops: Iterable[Operation]) -> list[Operation]:
    """Drop operations that cannot move anything (length-1 reversals, empty rounds)."""
    out = []
    for op in ops:
        if isinstance(op, Matching):
            if op.swaps:
                out.append(op)
        elif op.length > 1:
            out.append(op)
    return out


def makespan(ops: Iterable[Operation], model: Union[CostModel, str] = CostModel.LINEAR,
             n: int | None = None):
    """Parallel execution time of an ordered schedule.

    Each operation starts as soon as every earlier operation sharing a
    position with it has finished.  Degenerate operations are dropped first.
    """
    model = CostModel.coerce(model)
    ops = normalize(ops)
    if not ops:
        return Fraction(0) if model.exact else 0.0
    if n is None:
        n = 1 + max(op.hi if isinstance(op, Reversal) else max(op.support) for op in ops)
    ready = [0] * n if model.exact else [0.0] * n
    for op in ops:
        dur = _thirds(op, model) if model.exact else op_duration(op, model)
        if isinstance(op, Reversal):
            lo, hi = op.lo, op.hi + 1
            finish = max(ready[lo:hi]) + dur
            ready[lo:hi] = [finish] * (hi - lo)
        else:
            sup = op.support
            finish = max(ready[v] for v in sup) + dur
            for v in sup:
                ready[v] = finish
    total = max(ready)
    return Fraction(total, 3) if model.exact else float(total)


def binary_label(perm: Sequence[int], lo: int = 0, hi: int | None = None) -> tuple[int, ...]:
    """Label each token of ``perm[lo..hi]`` by which half of the segment it is bound for.

    A token gets 0 when its destination is among the first ``len // 2``
    positions of the segment, 1 otherwise.
    """
    if hi is None:
        hi = len(perm) - 1
    if not 0 <= lo <= hi < len(perm):
        raise ValueError(f"segment ({lo}, {hi}) out of range")
    split = lo + (hi - lo + 1) // 2
    bits = []
    for v in perm[lo:hi + 1]:
        if not lo <= v <= hi:
            raise ValueError(f"destination {v} lies outside segment ({lo}, {hi})")
        bits.append(0 if v < split else 1)
    return tuple(bits)


def d_infinity(perm: Sequence[int]) -> int:
    return max(abs(int(v) - i) for i, v in enumerate(perm))


def random_permutation(n: int, seed) -> tuple[int, ...]:
    """Uniform permutation of ``0..n-1`` drawn with numpy's PCG64 stream for ``seed``."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return tuple(int(v) for v in rng.permutation(n))


# -- serialization ----------------------------------------------------------

def _op_to_json(op: Operation) -> dict:
    if isinstance(op, Reversal):
        return {"type": "reversal", "lo": op.lo, "hi": op.hi}
    if isinstance(op, PathReversal):
        return {"type": "path_reversal", "path": list(op.path)}
    return {"type": "matching", "swaps": [list(s) for s in op.swaps]}


def _op_from_json(obj: dict) -> Operation:
    kind = obj.get("type")
    if kind == "reversal":
        return Reversal(int(obj["lo"]), int(obj["hi"]))
    if kind == "path_reversal":
        return PathReversal(tuple(obj["path"]))
    if kind == "matching":
        return Matching(tuple(tuple(s) for s in obj["swaps"]))
    raise ScheduleError(f"unknown operation type {kind!r}")


def schedule_to_json(ops: Iterable[Operation]) -> list[dict]:
    return [_op_to_json(op) for op in ops]


def schedule_from_json(data: list[dict]) -> list[Operation]:
    return [_op_from_json(obj) for obj in data]


def dumps_schedule(ops: Iterable[Operation], **kw) -> str:
    return json.dumps(schedule_to_json(ops), **kw)


def loads_schedule(text: str) -> list[Operation]:
    return schedule_from_json(json.loads(text))
