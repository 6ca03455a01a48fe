"""Ball diameters against exact gap enumeration, and the derivative
approximation's measured behaviour."""
import math
from fractions import Fraction

import pytest

from fareyphase import ball_geometry as bg
from fareyphase import errors
from fareyphase.farey_core import iter_new_triples
from fareyphase.partition import z_farey_tree


def brute_balls(k):
    """Exact gaps between new fractions #(2n-1) and #2n, as Fractions."""
    new = [Fraction(nm, dm) for _, dm, _, _, nm, _ in iter_new_triples(k)]
    return [b - a for a, b in zip(new[0::2], new[1::2])]


@pytest.mark.parametrize("k", range(2, 12))
def test_exact_matches_gap_enumeration(k):
    gaps = brute_balls(k)
    assert len(gaps) == 2 ** (k - 2)
    for n, gap in enumerate(gaps, start=1):
        assert bg.ball_exact(k, n) == float(gap)
        # cross-difference of the bounding pair is always 3
        assert gap.numerator == 3 or 3 % gap.numerator == 0


def test_seed_ball():
    assert bg.ball_exact(2, 1) == bg.SEED_GAP == pytest.approx(1 / 3)
    assert bg.symbols_for_ball(2, 1) == ()
    assert bg.ball_by_composition(()) == bg.SEED_GAP
    assert bg.ball_derivative_approx(()) == 1.0


@pytest.mark.parametrize("k", range(2, 13))
def test_composition_is_bitwise_exact(k):
    for n in range(1, 2 ** (k - 2) + 1):
        sym = bg.symbols_for_ball(k, n)
        assert len(sym) == k - 2
        assert bg.ball_by_composition(sym) == bg.ball_exact(k, n)


def test_symbol_words_are_a_bijection():
    for k in (3, 6, 10):
        words = {bg.symbols_for_ball(k, n) for n in range(1, 2 ** (k - 2) + 1)}
        assert len(words) == 2 ** (k - 2)
        assert all(len(w) == k - 2 and set(w) <= {0, 1} for w in words)


def test_adjacent_balls_differ_in_one_symbol():
    k = 9
    prev = bg.symbols_for_ball(k, 1)
    for n in range(2, 2 ** (k - 2) + 1):
        cur = bg.symbols_for_ball(k, n)
        assert sum(a != b for a, b in zip(prev, cur)) == 1
        prev = cur


@pytest.mark.parametrize("k", range(3, 13))
def test_derivative_ratio_window(k):
    # approx/exact lies strictly in (8/9, 1) for every nonempty prefix: the
    # distortion of a composed Moebius branch against its seed derivative
    # (the k=2 seed ball is reproduced exactly, ratio 1)
    lo = 8.0 / 9.0
    for rec in bg.ball_records(k):
        ratio = rec.approx_diameter / rec.exact_diameter
        assert lo < ratio < 1.0


def test_tail_ratio_limits():
    # all-0 tail: ratio decreases to 8/9; all-1 and alternating tails to
    # higher constants (frozen from independent evaluation)
    r_allzero = []
    for m in range(1, 15):
        sym = (0,) * m
        r_allzero.append(
            bg.SEED_GAP * bg.ball_derivative_approx(sym) / bg.ball_by_composition(sym)
        )
    assert all(a > b for a, b in zip(r_allzero, r_allzero[1:]))
    assert abs(r_allzero[-1] - 8.0 / 9.0) < 0.03

    sym1 = (1,) * 14
    r1 = bg.SEED_GAP * bg.ball_derivative_approx(sym1) / bg.ball_by_composition(sym1)
    assert r1 == pytest.approx(0.993808, abs=1e-4)

    alt = tuple((i % 2) for i in range(14))
    ra = bg.SEED_GAP * bg.ball_derivative_approx(alt) / bg.ball_by_composition(alt)
    assert ra == pytest.approx(0.996729, abs=1e-4)


def test_records_are_consistent():
    k = 8
    recs = bg.ball_records(k)
    assert [r.index for r in recs] == list(range(1, 2 ** (k - 2) + 1))
    for r in recs:
        assert r.level == k
        assert r.exact_diameter == bg.ball_exact(k, r.index)
        assert r.symbols == bg.symbols_for_ball(k, r.index)
        assert r.approx_diameter == pytest.approx(
            bg.SEED_GAP * bg.ball_derivative_approx(r.symbols), rel=1e-15
        )


def test_diameter_sums():
    prev = None
    for k in range(2, 13):
        s = bg.diameter_sum(k)
        assert 0.0 < s < 1.0
        if prev is not None:
            assert s < prev  # measure of the union shrinks every level
        prev = s
    assert bg.diameter_sum(2) == bg.SEED_GAP
    # the ball sum at unit exponent is exactly the tree partition sum
    assert bg.diameter_sum(10) == z_farey_tree(10, 1.0).value


def test_max_diameter():
    for k in (2, 5, 9):
        assert bg.max_diameter(k) == max(r.exact_diameter for r in bg.ball_records(k))


def test_approx_partition_counts_at_beta_zero():
    for k in (2, 7, 12):
        assert bg.approx_partition(k, 0.0) == float(2 ** (k - 2))


def test_approx_partition_quality_at_unit_beta():
    # the approximation undershoots; deviation stays within the advertised
    # few-percent band and the per-site log error shrinks with k
    devs = {}
    per_site = {}
    for k in (6, 10, 14, 16):
        a = bg.approx_partition(k, 1.0)
        z = z_farey_tree(k, 1.0).value
        assert a < z
        devs[k] = abs(a / z - 1.0)
        per_site[k] = abs(math.log(a / z)) / k
    assert devs[10] < 0.10  # within 10% at k=10
    assert devs[16] < 0.05  # within 5% at k=16
    assert per_site[6] > per_site[10] > per_site[14] > per_site[16]


def test_validation():
    with pytest.raises(ValueError):
        bg.ball_exact(1, 1)
    with pytest.raises(IndexError):
        bg.ball_exact(5, 9)
    with pytest.raises(IndexError):
        bg.symbols_for_ball(5, 0)
    with pytest.raises(ValueError):
        bg.ball_by_composition((0, 2))
    with pytest.raises(errors.LevelCapError):
        bg.approx_partition(bg.MAX_BALL_LEVEL + 1, 1.0)
    with pytest.raises(errors.LevelCapError):
        bg.ball_records(bg.MAX_BALL_LEVEL + 1)
