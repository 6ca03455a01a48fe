"""Partition sums against direct enumeration of materialized levels."""
import math
from collections import Counter
from fractions import Fraction
from math import gcd

import mpmath
import pytest

from fareyphase import errors, partition
from fareyphase.farey_core import iter_new_triples, level_fractions


def range_denominators(k):
    """Denominators of the level-k summation range (everything past 0/1)."""
    return [f.denominator for f in level_fractions(k)[1:]]


def brute_knauf(k, beta):
    return math.fsum(d ** (-beta) for d in range_denominators(k))


def brute_knauf_even(k, beta):
    # the even 1-based positions of the row are exactly the new fractions
    row = level_fractions(k)
    return math.fsum(f.denominator ** (-beta) for f in row[1::2])


def brute_chain(k, beta):
    row = level_fractions(k)
    return math.fsum(
        (a.denominator + b.numerator) ** (-beta) for a, b in zip(row, row[1:])
    )


def brute_tree(k, beta):
    new = [
        (Fraction(nm, dm), dm) for _, dm, _, _, nm, _ in iter_new_triples(k)
    ]
    terms = []
    for (xl, dl), (xr, dr) in zip(new[0::2], new[1::2]):
        gap = xr - xl
        assert gap.numerator == 3 or (dl * dr) % gap.denominator == 0
        terms.append(float(xr - xl) ** beta)
    return math.fsum(terms)


@pytest.mark.parametrize("k", [1, 2, 5, 9])
@pytest.mark.parametrize("beta", [-1.5, -1.0, 0.0, 0.5, 1.0, 2.0, 4.0])
def test_z_knauf_matches_enumeration(k, beta):
    pv = partition.z_knauf(k, beta)
    assert pv.model is partition.Model.KNAUF
    assert pv.terms == 2**k
    assert pv.value == pytest.approx(brute_knauf(k, beta), rel=1e-13)


def test_z_knauf_counting_anchor():
    # beta = 0 counts the summation range
    for k in (1, 4, 10):
        assert partition.z_knauf(k, 0.0).value == float(2**k)
    # k=2 by hand: denominators 3, 2, 3, 1 at exponent 2
    assert partition.z_knauf(2, 2.0).value == pytest.approx(
        1 / 9 + 1 / 4 + 1 / 9 + 1, rel=1e-15
    )


@pytest.mark.parametrize("k", [2, 3, 6, 10])
@pytest.mark.parametrize("beta", [-1.0, 0.5, 1.0, 2.0])
def test_even_odd_split(k, beta):
    even = partition.z_knauf_even(k, beta)
    odd = partition.z_knauf_odd(k, beta)
    assert even.terms == 2 ** (k - 1) and odd.terms == 2 ** (k - 1)
    assert even.value == pytest.approx(brute_knauf_even(k, beta), rel=1e-13)
    # the odd part is the previous level's full range, exactly
    assert odd.value == partition.z_knauf(k - 1, beta).value
    assert even.value + odd.value == pytest.approx(
        partition.z_knauf(k, beta).value, rel=1e-13
    )


@pytest.mark.parametrize("k", [1, 2, 4, 8, 11])
@pytest.mark.parametrize("beta", [0.5, 1.0, 2.5])
def test_chain_matches_enumeration(k, beta):
    pv = partition.z_farey_chain(k, beta)
    assert pv.terms == 2**k
    assert pv.value == pytest.approx(brute_chain(k, beta), rel=1e-13)


def test_chain_level2_by_hand():
    # pair energies at k=2 are 1+1, 3+1, 2+2, 3+1
    assert partition.z_farey_chain(2, 1.0).value == pytest.approx(
        1 / 2 + 1 / 4 + 1 / 4 + 1 / 4, rel=1e-15
    )


@pytest.mark.parametrize("k", [2, 3, 5, 9, 12])
@pytest.mark.parametrize("beta", [0.5, 1.0, 3.0])
def test_tree_matches_enumeration(k, beta):
    pv = partition.z_farey_tree(k, beta)
    assert pv.terms == 2 ** (k - 2)
    assert pv.value == pytest.approx(brute_tree(k, beta), rel=1e-12)


@pytest.mark.parametrize("k", [3, 7, 12])
@pytest.mark.parametrize("beta", [0.25, 1.0, 2.0])
def test_tree_dual_routes_agree(k, beta):
    direct = partition.z_farey_tree(k, beta).value
    gap_form, product_form = partition.z_farey_tree_paths(k, beta)
    assert gap_form == direct
    assert product_form == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("k", [2, 5, 12])
def test_profile_matches_per_level_enumeration(k):
    exponent = 1.3
    prof = partition.knauf_profile(k, exponent)
    assert prof[0] == 0.0
    for j in range(1, k + 1):
        want = math.fsum(dm ** (-exponent) for _, dm, *_ in iter_new_triples(j))
        assert prof[j] == pytest.approx(want, rel=1e-13)


@pytest.mark.parametrize("beta", [-1.0, -0.25, 0.25, 0.5, 1.0, 2.0])
def test_sandwich_holds(beta):
    for k in (2, 5, 11):
        rep = partition.verify_sandwich(k, beta)
        assert rep.holds, rep.detail
        if beta > 0:
            assert rep.lower < rep.value < rep.upper


def test_sandwich_counting_case():
    rep = partition.verify_sandwich(6, 0.0)
    assert rep.holds and rep.lower == rep.value == rep.upper


@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0, 2.0])
def test_telescope_identity(beta):
    for k in (2, 8, 13):
        rep = partition.verify_telescope(k, beta)
        assert rep.identity_ok, rep.residual
        assert rep.residual <= 1e-10
        if 0.0 < beta < 1.0:
            assert rep.growth_holds is True
        else:
            assert rep.growth_holds is None


def test_threads_are_byte_identical():
    for func in (
        partition.z_knauf,
        partition.z_knauf_even,
        partition.z_farey_chain,
        partition.z_farey_tree,
    ):
        a = func(14, 0.7, 1).value
        b = func(14, 0.7, 4).value
        assert a == b  # bit-for-bit, not approx
    pa = partition.knauf_profile(14, 1.4, 1)
    pb = partition.knauf_profile(14, 1.4, 4)
    assert pa.tolist() == pb.tolist()


def test_level_caps_and_bad_args():
    with pytest.raises(errors.LevelCapError):
        partition.z_knauf(partition.MAX_PARTITION_LEVEL + 1, 1.0)
    with pytest.raises(ValueError):
        partition.z_farey_tree(1, 1.0)  # needs a ball pair to exist
    with pytest.raises(ValueError):
        partition.knauf_profile(0, 1.0)


def brute_phi(k, n_max):
    counts = Counter(d for d in range_denominators(k) if d <= n_max)
    return counts


@pytest.mark.parametrize("k", [1, 3, 6, 10])
def test_dirichlet_counts_match_enumeration(k):
    n_max = 30
    table = partition.dirichlet_coefficients(k, n_max)
    want = brute_phi(k, n_max)
    assert table.level == k and table.n_max == n_max
    for n in range(1, n_max + 1):
        assert table.phi(n) == want.get(n, 0)
    with pytest.raises(ValueError):
        table.phi(0)


def test_dirichlet_profile_rows_are_levels():
    n_max = 25
    prof = partition.dirichlet_profile(8, n_max)
    for j in (1, 4, 8):
        tab = partition.dirichlet_coefficients(j, n_max)
        assert prof[j].tolist() == tab.counts.tolist()


def test_dirichlet_saturates_to_totient():
    # every m/n in lowest terms has entered by level n-1, so phi_k(n) = phi(n)
    # once k >= n - 1 (n >= 2)
    table = partition.dirichlet_coefficients(12, 13)
    for n in range(2, 14):
        assert table.phi(n) == partition.euler_totient(n)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 12, 30, 97, 128, 210])
def test_euler_totient_brute(n):
    assert partition.euler_totient(n) == sum(
        1 for i in range(1, n + 1) if gcd(i, n) == 1
    )
    with pytest.raises(ValueError):
        partition.euler_totient(0)


@pytest.mark.parametrize("beta", [1.25, 1.5, 2.0, 3.0])
def test_zeta_ratio_against_mpmath(beta):
    want = float(mpmath.zeta(2 * beta - 1) / mpmath.zeta(2 * beta))
    assert partition.zeta_ratio(beta) == pytest.approx(want, abs=1e-10)
    with pytest.raises(ValueError):
        partition.zeta_ratio(1.0)
