"""Solution counting for sums of reduced fractions: oracles and invariants."""

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redres.arith import BudgetError
from redres.fracsolve import (
    BoxConstraint,
    IntervalConstraint,
    NumeratorSetConstraint,
    classify_degenerate,
    count_box,
    count_interval,
    count_numerator_sets,
    fractions_in_box,
    fractions_in_interval,
    iter_solutions,
    reference_bounds,
)


def brute_count(alphabets, target):
    """Literal enumeration with Fraction sums."""
    hits = 0
    for combo in itertools.product(*alphabets):
        s = sum(combo, Fraction(0))
        if (s.denominator == 1) if target is None else (s == target):
            hits += 1
    return hits


def test_box_alphabet_contents():
    a = fractions_in_box(1, 2)
    assert a == [Fraction(x) for x in (-1, Fraction(-1, 2), 0, Fraction(1, 2), 1)]
    assert len(fractions_in_box(2, 3)) == 11
    assert all(f.denominator <= 3 and abs(f.numerator) <= 2
               for f in fractions_in_box(2, 3))
    assert fractions_in_box(0, 5) == [0]
    with pytest.raises(ValueError):
        fractions_in_box(-1, 2)
    with pytest.raises(ValueError):
        fractions_in_box(1, 0)


def test_interval_alphabet_contents():
    a = fractions_in_interval(Fraction(0), Fraction(1, 2), 4)
    assert a == [0, Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)]
    assert fractions_in_interval(Fraction(-1, 3), Fraction(1, 3), 1) == [0]
    with pytest.raises(ValueError):
        fractions_in_interval(Fraction(1, 2), Fraction(1, 3), 4)


def test_box_counts_frozen():
    assert count_box(BoxConstraint(3, 1, 1)).total == 27
    assert count_box(BoxConstraint(3, 1, 2)).total == 63
    assert count_box(BoxConstraint(3, 1, 1, target=0)).total == 7
    rep = count_box(BoxConstraint(3, 2, 3, target=1))
    assert rep.method in ("naive", "meet-in-the-middle")
    assert rep.elapsed_seconds >= 0


def test_box_counts_match_brute_force():
    for k in (1, 2, 3):
        for n, q in [(1, 2), (2, 2), (1, 3)]:
            al = fractions_in_box(n, q)
            for target in (None, 0, 1, -2):
                expected = brute_count([al] * k, target)
                c = BoxConstraint(k, n, q, target)
                assert count_box(c, method="naive").total == expected
                assert count_box(c, method="mitm").total == expected


def test_methods_agree_on_larger_box():
    c = BoxConstraint(3, 2, 4)
    a = count_box(c, method="naive")
    b = count_box(c, method="mitm")
    assert a.total == b.total
    assert a.method == "naive" and b.method == "meet-in-the-middle"


def test_interval_counts_frozen():
    c = IntervalConstraint(
        ((Fraction(0), Fraction(1, 2)),) * 3, (4, 4, 4), None
    )
    assert count_interval(c).total == 8
    c1 = IntervalConstraint(
        ((Fraction(0), Fraction(1, 2)),) * 3, (4, 4, 4), 1
    )
    assert count_interval(c1).total == 7
    mixed = IntervalConstraint(
        ((Fraction(-1, 2), Fraction(1, 2)), (Fraction(0), Fraction(1)),
         (Fraction(-1), Fraction(-1, 4))),
        (3, 4, 5),
        None,
    )
    assert count_interval(mixed, method="naive").total == 25
    assert count_interval(mixed, method="mitm").total == 25


def test_interval_counts_match_brute_force():
    ivals = ((Fraction(-1, 2), Fraction(1, 2)), (Fraction(0), Fraction(1)),
             (Fraction(-1), Fraction(-1, 4)))
    caps = (3, 4, 5)
    als = [fractions_in_interval(lo, hi, cap) for (lo, hi), cap in zip(ivals, caps)]
    for target in (None, 0, 1):
        c = IntervalConstraint(ivals, caps, target)
        assert count_interval(c).total == brute_count(als, target)


def test_numerator_set_counts():
    c = NumeratorSetConstraint(((1, 2),) * 3, (3, 3, 3), None)
    assert count_numerator_sets(c).total == 28
    c1 = NumeratorSetConstraint(((1,),) * 3, (1, 1, 1), None)
    assert count_numerator_sets(c1).total == 1
    # brute force the same alphabets
    als = [
        [Fraction(b, q) for b in (1, 2) for q in range(1, 4) if math.gcd(b, q) == 1]
        for _ in range(3)
    ]
    assert count_numerator_sets(c).total == brute_count(als, None)


def test_target_sign_symmetry():
    # the box alphabet is symmetric under negation
    for t in (1, 2):
        a = count_box(BoxConstraint(3, 2, 3, target=t)).total
        b = count_box(BoxConstraint(3, 2, 3, target=-t)).total
        assert a == b


def test_iter_solutions_consistent_with_count():
    al = fractions_in_box(1, 3)
    pairs = [(f.numerator, f.denominator) for f in al]
    sols = list(iter_solutions([pairs] * 3, 0))
    assert len(sols) == count_box(BoxConstraint(3, 1, 3, target=0)).total
    for sol in sols:
        assert sum(Fraction(a, b) for a, b in sol) == 0
    any_sols = list(iter_solutions([pairs] * 3, None))
    assert len(any_sols) == count_box(BoxConstraint(3, 1, 3)).total


def test_classify_degenerate_frozen():
    rep = classify_degenerate(BoxConstraint(3, 2, 4, target=0))
    assert (rep.total, rep.degenerate, rep.non_degenerate) == (73, 37, 36)
    assert rep.degenerate + rep.non_degenerate == rep.total


def test_classify_degenerate_brute_force():
    c = BoxConstraint(3, 1, 3, target=0)
    rep = classify_degenerate(c)
    al = fractions_in_box(1, 3)
    total = deg = 0
    for combo in itertools.product(al, repeat=3):
        if sum(combo, Fraction(0)) != 0:
            continue
        total += 1
        is_deg = False
        for mask in range(1, 1 << 3):
            if mask.bit_count() == 3:
                continue
            if sum((combo[i] for i in range(3) if mask >> i & 1),
                   Fraction(0)) == 0:
                is_deg = True
                break
        if is_deg:
            deg += 1
    assert rep.total == total
    assert rep.degenerate == deg
    assert rep.non_degenerate == total - deg


def test_classify_requires_zero_target():
    with pytest.raises(ValueError):
        classify_degenerate(BoxConstraint(3, 1, 2))
    with pytest.raises(ValueError):
        classify_degenerate(BoxConstraint(3, 1, 2, target=1))
    with pytest.raises(ValueError):
        classify_degenerate(BoxConstraint(7, 1, 2, target=0))


def test_zero_target_witness_family():
    # (x, -x, 0) is always a solution, so the zero-target count is at least
    # the alphabet size
    for n, q in [(1, 2), (2, 3), (2, 4)]:
        al = fractions_in_box(n, q)
        total = count_box(BoxConstraint(3, n, q, target=0)).total
        assert total >= len(al)


def test_count_monotone_in_box():
    prev = 0
    for q in (1, 2, 3, 4):
        cur = count_box(BoxConstraint(3, 2, q)).total
        assert cur >= prev
        prev = cur


def test_fraction_spacing_in_box():
    # distinct reduced fractions with denominators <= Q differ by >= 1/Q^2
    for q_max in (2, 8, 32, 64):
        al = fractions_in_box(1, q_max)
        gaps = [b - a for a, b in zip(al, al[1:])]
        assert min(gaps) >= Fraction(1, q_max * q_max)


def test_worker_independence():
    c = BoxConstraint(3, 2, 4)
    base = count_box(c, method="naive").total
    assert count_box(c, method="naive", workers=3).total == base
    assert count_box(c, method="mitm", workers=3).total == base


def test_reference_bounds_box():
    b = reference_bounds(BoxConstraint(3, 4, 16))
    assert b["upper_shape"] == 256
    assert b["lower_shape_k3"] == 256
    assert b["nondegenerate_heuristic"] == 256
    b5 = reference_bounds(BoxConstraint(5, 2, 3))
    assert b5["upper_shape"] == 2**3 * 3**2
    assert "lower_shape_k3" not in b5


def test_reference_bounds_interval_and_sets():
    c = IntervalConstraint(
        ((Fraction(0), Fraction(1, 2)), (Fraction(0), Fraction(1)),
         (Fraction(-1), Fraction(1))),
        (4, 4, 4),
        None,
    )
    b = reference_bounds(c)
    # picks the two narrowest of the three intervals
    assert b["minimizing_coordinates"] == (0, 1)
    assert b["upper_shape"] == Fraction(1, 2) * 1 * 64
    s = NumeratorSetConstraint(((1,), (1, 2), (1, 2, 3)), (5, 5, 5), None)
    bs = reference_bounds(s)
    assert bs["minimizing_coordinates"] == (0, 1)
    assert bs["upper_shape"] == 1 * 2 * 5


def test_validation_errors():
    with pytest.raises(ValueError):
        count_box(BoxConstraint(0, 1, 2))
    with pytest.raises(ValueError):
        count_box(BoxConstraint(8, 1, 2))
    with pytest.raises(ValueError):
        count_box(BoxConstraint(3, 1, 2), method="magic")
    with pytest.raises(ValueError):
        count_interval(IntervalConstraint(
            ((Fraction(0), Fraction(1)),) * 2, (3, 3), None))  # even arity
    with pytest.raises(ValueError):
        count_interval(IntervalConstraint(
            ((Fraction(0), Fraction(2)),) * 3, (3, 3, 3), None))  # outside [-1,1]
    with pytest.raises(ValueError):
        count_interval(IntervalConstraint(
            ((Fraction(0), Fraction(1, 5)),) * 3, (3, 3, 3), None))  # too narrow
    with pytest.raises(ValueError):
        count_numerator_sets(NumeratorSetConstraint(((),) * 3, (3, 3, 3), None))
    with pytest.raises(ValueError):
        count_numerator_sets(NumeratorSetConstraint(((4,),) * 3, (3, 3, 3), None))
    with pytest.raises(ValueError):
        count_numerator_sets(NumeratorSetConstraint(((1,),) * 2, (3, 3), None))
    with pytest.raises(BudgetError):
        fractions_in_box(300, 300)


@given(
    st.integers(min_value=1, max_value=2),
    st.integers(min_value=1, max_value=3),
    st.sampled_from([None, 0, 1]),
)
@settings(max_examples=40, deadline=None)
def test_engines_agree_property(n, q_max, target):
    c = BoxConstraint(3, n, q_max, target)
    assert count_box(c, method="naive").total == count_box(c, method="mitm").total
