"""Singular series over squarefree moduli: frozen values, laws, budgets."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redres.arith import BudgetError, primorial, totient
from redres.singular import (
    R_mod_q,
    S0_mod_q,
    S_infinite,
    S_mod_q,
    check_repeated_elements,
    check_S0_expansion,
    gallagher_ratio,
    nu_p,
    sum_S0_over_tuples,
)


def test_nu_p():
    assert nu_p((0, 2), 2) == 1
    assert nu_p((0, 2), 3) == 2
    assert nu_p((0, 3, 6), 3) == 1
    with pytest.raises(ValueError):
        nu_p((0, 2), 4)


def test_plain_series_frozen_values():
    assert S_mod_q((0, 2), 2) == 2
    assert S_mod_q((0, 2), 30) == Fraction(45, 32)
    assert S_mod_q((0,), 30) == 1
    assert S_mod_q((), 30) == 1
    # nu_p = p kills the factor: any pair covering both residues mod 2
    assert S_mod_q((0, 1), 2) == 0


def test_refined_series_frozen_values():
    assert S0_mod_q((), 30) == 1
    assert S0_mod_q((5,), 30) == 0
    assert S0_mod_q((0, 2), 30) == Fraction(13, 32)
    assert S0_mod_q((0, 1), 2) == -1
    assert S0_mod_q((1, 1), 2) == 1


def test_singleton_series_is_one():
    for q in (2, 6, 30, 210):
        for d in (0, 1, 7):
            assert S_mod_q((d,), q) == 1
            assert S0_mod_q((d,), q) == 0


def test_duality_plain_equals_subset_sum_of_refined():
    for q in (2, 6, 30):
        for d in [(0, 2), (1, 2, 4), (0, 5)]:
            k = len(d)
            total = Fraction(0)
            for mask in range(1 << k):
                sub = tuple(d[i] for i in range(k) if mask >> i & 1)
                total += S0_mod_q(sub, q)
            assert total == S_mod_q(d, q)


def test_multiplicative_in_coprime_moduli():
    for q1, q2 in [(2, 3), (2, 15), (6, 35), (10, 21)]:
        for d in [(0, 2), (0, 2, 6), (1, 4)]:
            assert S_mod_q(d, q1 * q2) == S_mod_q(d, q1) * S_mod_q(d, q2)


def test_permutation_and_translation_invariance():
    q = 30
    for d in [(0, 2), (0, 2, 6), (1, 3, 7)]:
        base_s = S_mod_q(d, q)
        base_s0 = S0_mod_q(d, q)
        for perm in itertools.permutations(d):
            assert S_mod_q(perm, q) == base_s
            assert S0_mod_q(perm, q) == base_s0
        for c in (-5, 1, 30, 137):
            shifted = tuple(x + c for x in d)
            assert S_mod_q(shifted, q) == base_s


def test_repeated_elements_law():
    for q in (2, 6, 30, 210):
        assert check_repeated_elements((0,), (0, 0), q) == 0
        assert check_repeated_elements((0, 2), (0, 2, 2, 0), q) == 0
        assert check_repeated_elements((1, 3, 4), (4, 1, 3, 3), q) == 0
    # direct statement: one duplicate multiplies by q/phi(q)
    q = 30
    z = Fraction(q, totient(q))
    assert S_mod_q((0, 2, 2), q) == z * S_mod_q((0, 2), q)
    with pytest.raises(ValueError):
        check_repeated_elements((0, 0), (0, 0), 6)
    with pytest.raises(ValueError):
        check_repeated_elements((0, 2), (0, 3), 6)


def test_infinite_product_truncation():
    value, bound = S_infinite((0, 2), 10**5)
    assert bound < 1e-4
    # classical twin reference value to 10 places
    assert abs(value - 1.3203236316) <= bound
    assert value == pytest.approx(1.320324690933465, rel=1e-12)
    # truncation equals the exact product over the same primes
    value30, _ = S_infinite((0, 2), 30)
    assert value30 == pytest.approx(float(S_mod_q((0, 2), primorial(30))), rel=1e-12)


def test_infinite_product_validation():
    with pytest.raises(ValueError):
        S_infinite((0, 0), 100)
    with pytest.raises(ValueError):
        S_infinite((0, 2), 3)  # below 2k
    with pytest.raises(ValueError):
        S_infinite((0, 100), 50)  # below the spread
    with pytest.raises(BudgetError):
        S_infinite((0, 2), 3 * 10**6)


def test_expansion_matches_exact():
    for q in (2, 6, 30, 210):
        for d in [(0,), (3,), (0, 2), (1, 4), (0, 2, 6)]:
            assert check_S0_expansion(d, q) < 1e-9


def test_expansion_validation():
    with pytest.raises(ValueError):
        check_S0_expansion((0, 1, 2, 3), 6)  # k cap is 3
    with pytest.raises(ValueError):
        check_S0_expansion((0, 2), 2310)  # five prime factors
    with pytest.raises(ValueError):
        check_S0_expansion((0, 2), 4)  # not squarefree


def test_tuple_sums_frozen():
    assert sum_S0_over_tuples(1, 2, 2) == 1
    assert R_mod_q(3, 2, 30) == Fraction(-51, 16)
    # the distinct sum drops the diagonal
    h, k, q = 3, 2, 6
    diag = sum(S0_mod_q((d, d), q) for d in range(1, h + 1))
    assert sum_S0_over_tuples(h, k, q) - diag == R_mod_q(h, k, q)


def test_tuple_sums_brute_force_small():
    h, q = 3, 30
    for k in (1, 2, 3):
        brute = sum(
            S0_mod_q(d, q) for d in itertools.product(range(1, h + 1), repeat=k)
        )
        assert sum_S0_over_tuples(h, k, q) == brute


def test_worker_count_does_not_change_values():
    assert sum_S0_over_tuples(4, 3, 30, workers=3) == sum_S0_over_tuples(4, 3, 30)
    assert R_mod_q(4, 3, 30, workers=2) == R_mod_q(4, 3, 30)


def test_gallagher_ratio_frozen_and_drift():
    q = primorial(30)
    r4 = gallagher_ratio(4, 2, q)
    r8 = gallagher_ratio(8, 2, q)
    r12 = gallagher_ratio(12, 2, q)
    assert r4 == pytest.approx(0.33256919821724296, rel=1e-12)
    assert r8 == pytest.approx(0.5819960968801752, rel=1e-12)
    assert r12 == pytest.approx(0.6774557741462357, rel=1e-12)
    assert abs(r4 - 1) > abs(r8 - 1) > abs(r12 - 1)


def test_validation_and_budgets():
    with pytest.raises(ValueError):
        S_mod_q((0, 2), 12)  # not squarefree
    with pytest.raises(ValueError):
        S_mod_q((0, 2), 0)
    with pytest.raises(ValueError):
        S_mod_q(tuple(range(9)), 6)  # k cap
    with pytest.raises(ValueError):
        S_mod_q((10**6 + 1,), 6)  # entry cap
    with pytest.raises(BudgetError):
        R_mod_q(100, 8, 6)
    with pytest.raises(ValueError):
        R_mod_q(3, 0, 6)
    with pytest.raises(ValueError):
        sum_S0_over_tuples(0, 2, 6)


@given(
    st.lists(st.integers(min_value=-50, max_value=50), min_size=0, max_size=4),
    st.sampled_from([2, 6, 30]),
)
@settings(max_examples=150, deadline=None)
def test_series_sign_and_duality_property(d, q):
    d = tuple(d)
    s = S_mod_q(d, q)
    assert s >= 0
    k = len(d)
    total = Fraction(0)
    for mask in range(1 << k):
        total += S0_mod_q(tuple(d[i] for i in range(k) if mask >> i & 1), q)
    assert total == s
