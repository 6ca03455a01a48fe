"""Exact Farey levels, streaming mediant traversal, and the interval maps.

Level k holds 2^k + 1 fractions.  Level 0 is {0/1, 1/1}; level k+1 keeps
every fraction of level k and inserts the mediant (a+c)/(b+d) between each
adjacent pair a/b, c/d.  All arithmetic on numerators and denominators is
exact integer arithmetic; floating point enters only when values or
partition-function terms are requested.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterator

from .errors import LevelCapError, OverflowCapError

# Denominators grow at most like Fibonacci numbers: the largest denominator
# at level k is Fibonacci(k+2).  Fibonacci(90) still fits in a signed 64-bit
# integer, so streaming stays overflow-safe through level 88.
MAX_STREAM_LEVEL = 88
# Materializing a level costs 2^k + 1 objects; 24 (~16.7M) is the hard cap.
MAX_LIST_LEVEL = 24


@dataclass(frozen=True, slots=True)
class FareyFraction:
    """A fraction n/d of some level, with its 1-based position in the row."""

    numerator: int
    denominator: int
    level: int
    index: int

    @property
    def value(self) -> float:
        return self.numerator / self.denominator

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


@dataclass(frozen=True, slots=True)
class MediantFrame:
    """A bracket of adjacent fractions spanning one mediant subtree.

    depth counts mediant insertions from the root bracket (0/1, 1/1), so the
    mediant of a depth-d frame is a new fraction of level d+1.
    """

    left: FareyFraction
    right: FareyFraction
    depth: int

    @property
    def is_unimodular(self) -> bool:
        a, b = self.left.numerator, self.left.denominator
        c, d = self.right.numerator, self.right.denominator
        return c * b - a * d == 1


def level_fractions(k: int) -> list[FareyFraction]:
    """Return the full ordered row of level k as FareyFraction objects.

    Capped at MAX_LIST_LEVEL; for larger k use traverse_new_pairs, which
    streams in O(k) memory instead of materializing 2^k + 1 objects.
    """
    if k < 0:
        raise ValueError(f"level must be nonnegative, got {k}")
    if k > MAX_LIST_LEVEL:
        raise LevelCapError(
            f"level {k} exceeds the materialization cap {MAX_LIST_LEVEL}; "
            "use traverse_new_pairs to stream larger levels"
        )
    row = [(0, 1), (1, 1)]
    for _ in range(k):
        nxt = []
        for (a, b), (c, d) in zip(row, row[1:]):
            nxt.append((a, b))
            nxt.append((a + c, b + d))
        nxt.append(row[-1])
        row = nxt
    return [
        FareyFraction(n, d, level=k, index=i + 1) for i, (n, d) in enumerate(row)
    ]


def _check_stream_level(k: int) -> None:
    if k < 1:
        raise ValueError(f"level must be >= 1, got {k}")
    if k > MAX_STREAM_LEVEL:
        raise OverflowCapError(
            f"level {k} exceeds {MAX_STREAM_LEVEL}: denominators reach "
            "Fibonacci(k+2) and would overflow 64-bit integers"
        )


def iter_new_triples(k: int) -> Iterator[tuple[int, int, int, int, int, int]]:
    """Yield (d_left, d_new, d_right, n_left, n_new, n_right) for every new
    fraction of level k, in ascending fraction order.

    d_left/d_right and n_left/n_right belong to the level k-1 neighbors the
    mediant is inserted between.  Iterative with an explicit stack, depth at
    most k, so memory stays O(k) while 2^(k-1) triples stream out.
    """
    _check_stream_level(k)
    # Frames: (d_left, n_left, d_right, n_right, depth); left child pushed
    # last so it pops first, which keeps the stream in ascending order.
    stack = [(1, 0, 1, 1, 0)]
    target = k - 1
    while stack:
        dl, nl, dr, nr, depth = stack.pop()
        dm = dl + dr
        nm = nl + nr
        if depth == target:
            yield dl, dm, dr, nl, nm, nr
        else:
            stack.append((dm, nm, dr, nr, depth + 1))
            stack.append((dl, nl, dm, nm, depth + 1))


def traverse_new_pairs(
    k: int, visitor: Callable[[int, int, int, int, int, int], None]
) -> int:
    """Call visitor(d_left, d_new, d_right, n_left, n_new, n_right) for each
    new fraction of level k in ascending order.  Returns the visit count."""
    count = 0
    for triple in iter_new_triples(k):
        visitor(*triple)
        count += 1
    return count


def iter_frames(k: int) -> Iterator[MediantFrame]:
    """Yield the depth-(k-1) brackets of the mediant tree in ascending order.

    Each frame brackets exactly one new fraction of level k.  Intended for
    inspection and tests; the numeric kernels re-implement the same walk on
    plain integers.
    """
    for dl, dm, dr, nl, nm, nr in iter_new_triples(k):
        yield MediantFrame(
            left=FareyFraction(nl, dl, level=k - 1, index=-1),
            right=FareyFraction(nr, dr, level=k - 1, index=-1),
            depth=k - 1,
        )


def split_plan(
    split_depth: int,
) -> list[tuple[str, tuple[int, int, int, int], int]]:
    """Ascending-order plan for partitioning the mediant tree at a depth.

    Returns a list of ('chunk', (d_left, n_left, d_right, n_right), depth)
    entries for the 2^split_depth depth-`split_depth` brackets, interleaved
    with ('sep', (d, n, 0, 0), depth) entries for the fractions created at
    depths 1..split_depth that sit between consecutive brackets.  Folding
    chunk results and separator terms in plan order reproduces one fixed
    global ordering regardless of how many workers computed the chunks.
    """
    if split_depth < 0:
        raise ValueError("split depth must be >= 0")
    plan: list[tuple[str, tuple[int, int, int, int], int]] = []

    def rec(dl: int, nl: int, dr: int, nr: int, depth: int) -> None:
        if depth == split_depth:
            plan.append(("chunk", (dl, nl, dr, nr), depth))
            return
        dm, nm = dl + dr, nl + nr
        rec(dl, nl, dm, nm, depth + 1)
        plan.append(("sep", (dm, nm, 0, 0), depth + 1))
        rec(dm, nm, dr, nr, depth + 1)

    rec(1, 0, 1, 1, 0)
    return plan


def farey_map(x: float) -> float:
    """The interval map: x/(1-x) on [0, 1/2], (1-x)/x on (1/2, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"farey_map needs x in [0, 1], got {x}")
    if x <= 0.5:
        return x / (1.0 - x)
    return (1.0 - x) / x


def presentation(eps: int, x: float) -> float:
    """Inverse branch eps of the map: F_0 = x/(1+x), F_1 = 1/(1+x) = 1 - F_0.

    F_0 inverts the left branch onto [0, 1/2]; F_1 inverts the right branch
    onto [1/2, 1] and reverses orientation.
    """
    if eps not in (0, 1):
        raise ValueError(f"branch symbol must be 0 or 1, got {eps}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"presentation needs x in [0, 1], got {x}")
    if eps == 0:
        return x / (1.0 + x)
    return 1.0 / (1.0 + x)


def fraction_gcd_ok(f: FareyFraction) -> bool:
    """Lowest-terms check used by tests."""
    return gcd(f.numerator, f.denominator) == 1
