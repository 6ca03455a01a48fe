"""Ball diameters of the binary-tree fraction construction.

A level-k ball (k >= 2) is the gap between the (2n-1)-th and 2n-th new
fractions of level k, i.e. between row indices 4n-2 and 4n.  Every ball is
also the image of the fixed seed interval (F_0(1/2), F_1(1/2)) = (1/3, 2/3)
under a composition of the two presentation maps; the composition prefix has
k-2 symbols (empty at k=2).  Diameters can therefore be computed three ways:

* exactly, from the integer denominators of the two row entries,
* by composing presentation maps onto the two seed endpoints,
* approximately, from the derivative of the composed prefix at the seed
  point 1/2 times the seed-gap length 1/3.

The first two must agree to rounding; the third becomes exact only in the
large-k limit and is what turns the diameter sum into a transfer-operator
iteration.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import _kernels
from .errors import LevelCapError
from .farey_core import MAX_STREAM_LEVEL, iter_new_triples, presentation

# |F_0(1/2) - F_1(1/2)|: the seed interval every composed prefix is applied to.
SEED_GAP = 1.0 / 3.0
# Enumerating records or the approximate sum costs 2^(k-2) work.
MAX_BALL_LEVEL = 20


@dataclass(frozen=True, slots=True)
class BallRecord:
    """One ball: exact diameter, its composition symbols, and the derivative value."""

    level: int
    index: int
    exact_diameter: float
    symbols: tuple[int, ...]
    approx_diameter: float


def _check_ball_args(k: int, n: int) -> None:
    if k < 2:
        raise ValueError(f"balls exist for k >= 2, got k={k}")
    if k > MAX_STREAM_LEVEL:
        raise LevelCapError(f"level {k} exceeds the overflow-safe cap {MAX_STREAM_LEVEL}")
    if not 1 <= n <= 1 << (k - 2):
        raise IndexError(f"ball index {n} outside [1, 2^{k - 2}] at level {k}")


def _pair_denominators(k: int, n: int) -> tuple[int, int]:
    # Walk k-1 mediant insertions toward new fraction #m (bits of m-1, MSB
    # first) and read off the denominators of new fractions 2n-1 and 2n.
    # Both lie in the bracket reached after the first k-2 steps.
    m = 2 * n - 1
    dl, dr = 1, 1
    for shift in range(k - 2, 0, -1):
        dm = dl + dr
        if (m - 1) >> shift & 1:
            dl = dm
        else:
            dr = dm
    dm = dl + dr
    # last two insertions: #2n-1 is the mediant, #2n its right neighbour's mediant
    return dl + dm, dm + dr


def ball_exact(k: int, n: int) -> float:
    """Exact diameter of ball n at level k, from integer denominators.

    The two row entries bounding the ball always have cross-difference 3,
    so the diameter is 3/(d_left * d_right).
    """
    _check_ball_args(k, n)
    d1, d2 = _pair_denominators(k, n)
    return 3.0 / (d1 * d2)


def symbols_for_ball(k: int, n: int) -> tuple[int, ...]:
    """Composition prefix (length k-2) of ball n at level k.

    The balls in row order correspond to prefixes in Gray-code order: two
    horizontally adjacent balls differ in exactly one branch choice, so the
    bit pattern of the prefix is the Gray code of n-1, most significant
    symbol first.
    """
    _check_ball_args(k, n)
    g = (n - 1) ^ ((n - 1) >> 1)
    return tuple(g >> i & 1 for i in range(k - 3, -1, -1))


def ball_by_composition(symbols: tuple[int, ...] | list[int]) -> float:
    """Diameter via |F_s(F_0(1/2)) - F_s(F_1(1/2))| with F_s the composed prefix.

    An empty prefix is the level-2 ball itself.  The prefix is applied
    outermost-symbol-first, i.e. the last symbol acts on the seed endpoints.
    On rationals the branch maps are F_0(p/q) = p/(p+q) and F_1(p/q) =
    q/(p+q), so the whole composition runs on exact integer pairs; floating
    the endpoints first would cancel roughly |log10 diameter| digits in the
    final subtraction.
    """
    ln, ld = 1, 3
    hn, hd = 2, 3
    for eps in reversed(symbols):
        if eps not in (0, 1):
            raise ValueError(f"branch symbol must be 0 or 1, got {eps}")
        ln, ld = (ln, ln + ld) if eps == 0 else (ld, ln + ld)
        hn, hd = (hn, hn + hd) if eps == 0 else (hd, hn + hd)
    return abs(hn * ld - ln * hd) / (hd * ld)


def ball_derivative_approx(symbols: tuple[int, ...] | list[int]) -> float:
    """Derivative of the composed prefix at the seed point 1/2 (chain rule).

    Both branch derivatives have magnitude 1/(1+x)^2, so only the forward
    orbit of the seed matters.  The empty prefix gives 1.
    """
    x = 0.5
    prod = 1.0
    for eps in reversed(symbols):
        prod /= (1.0 + x) * (1.0 + x)
        x = presentation(eps, x)
    return prod


def approx_partition(k: int, beta: float) -> float:
    """Sum of (SEED_GAP * prefix derivative)^beta over all 2^(k-2) prefixes.

    Approximates the level-k tree partition sum.  The per-site log deviation
    |ln(approx/exact)|/k shrinks as k grows, though the plain relative
    deviation saturates at a few percent because each ball's approximation
    ratio tends to a tail-dependent constant below 1.  At beta=0 the value
    is exactly the ball count.
    """
    if not 2 <= k <= MAX_BALL_LEVEL:
        raise LevelCapError(f"approximate sum supports 2 <= k <= {MAX_BALL_LEVEL}, got {k}")
    s, c = _kernels.approx_tree_sum(k - 2, float(beta), SEED_GAP)
    return s - c


def ball_records(k: int) -> list[BallRecord]:
    """All level-k balls in row order, with exact and approximate diameters."""
    if not 2 <= k <= MAX_BALL_LEVEL:
        raise LevelCapError(f"record enumeration supports 2 <= k <= {MAX_BALL_LEVEL}, got {k}")
    records: list[BallRecord] = []
    pending = 0  # denominator of the odd member of the current pair
    for _dl, dm, _dr, _nl, _nm, _nr in iter_new_triples(k):
        if not pending:
            pending = dm
            continue
        n = len(records) + 1
        symbols = symbols_for_ball(k, n)
        records.append(
            BallRecord(
                level=k,
                index=n,
                exact_diameter=3.0 / (pending * dm),
                symbols=symbols,
                approx_diameter=SEED_GAP * ball_derivative_approx(symbols),
            )
        )
        pending = 0
    return records


def diameter_sum(k: int) -> float:
    """Sum of all exact level-k diameters (stays below the unit interval length)."""
    _check_ball_args(k, 1)
    total = 0.0
    comp = 0.0
    pending = 0
    for _dl, dm, _dr, _nl, _nm, _nr in iter_new_triples(k):
        if not pending:
            pending = dm
            continue
        y = 3.0 / (pending * dm) - comp
        t = total + y
        comp = (t - total) - y
        total = t
        pending = 0
    return total


def max_diameter(k: int) -> float:
    """Largest level-k ball; decreases with k."""
    _check_ball_args(k, 1)
    # The extreme balls sit at the row ends where denominators grow slowest.
    best = 0.0
    pending = 0
    for _dl, dm, _dr, _nl, _nm, _nr in iter_new_triples(k):
        if not pending:
            pending = dm
            continue
        d = 3.0 / (pending * dm)
        if d > best:
            best = d
        pending = 0
    return best
