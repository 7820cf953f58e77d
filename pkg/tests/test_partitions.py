"""Set partitions, signed weights, and the distinct-tuple identities."""

import itertools
from fractions import Fraction

import pytest

from redres.partitions import (
    ONE,
    IntPolynomial,
    MainTermTable,
    SetPartition,
    check_distinctness_expansion,
    check_partition_lemma,
    check_Rk_partition_identity,
    enumerate_partitions,
    f_poly,
    main_term_table,
    P_poly,
    w_weight,
    w_weight_bruteforce,
)

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140]


def test_enumeration_counts_are_bell():
    for k in range(1, 8):
        parts = enumerate_partitions(k)
        assert len(parts) == BELL[k]
        assert len(set(parts)) == len(parts)
        assert all(p.k == k for p in parts)


def test_partition_make_validates():
    p = SetPartition.make([(2, 1), (3,)])
    assert p.blocks == ((1, 2), (3,))
    assert p.n_blocks == 2
    assert p.block_index_of(3) == 1
    with pytest.raises(ValueError):
        SetPartition.make([(1, 2), (2, 3)])  # overlap
    with pytest.raises(ValueError):
        SetPartition.make([(1,), (3,)])  # gap
    with pytest.raises(ValueError):
        SetPartition.make([(1,), ()])  # empty block


def test_constant_on_blocks():
    p = SetPartition.make([(1, 3), (2,)])
    assert p.is_constant_on_blocks((7, 4, 7))
    assert not p.is_constant_on_blocks((7, 4, 5))


def test_weights_single_block_factorial():
    import math

    # one block of size s carries (-1)^(s-1) (s-1)!
    for s in range(1, 7):
        p = SetPartition.make([tuple(range(1, s + 1))])
        assert w_weight(p) == (-1) ** (s - 1) * math.factorial(s - 1)


def test_weights_match_connected_graph_count():
    # closed form against the signed union-connectivity brute force
    for k in range(1, 7):
        for p in enumerate_partitions(k):
            assert w_weight(p) == w_weight_bruteforce(p)


def test_weight_shapes():
    # j disjoint pairs plus singletons: (-1)^j; swap one pair for a triple: doubles
    for j in range(0, 3):
        blocks = [(2 * i + 1, 2 * i + 2) for i in range(j)] + [(2 * j + 1,)]
        assert w_weight(SetPartition.make(blocks)) == (-1) ** j
        blocks = [(2 * i + 1, 2 * i + 2) for i in range(j)]
        blocks.append((2 * j + 1, 2 * j + 2, 2 * j + 3))
        assert w_weight(SetPartition.make(blocks)) == 2 * (-1) ** j


def test_polynomial_arithmetic():
    a = IntPolynomial.make([1, 2, 0])
    assert a.coeffs == (1, 2)
    assert a.degree == 1
    b = IntPolynomial.make([0, 0, 3])
    assert (a + b).coeffs == (1, 2, 3)
    assert (a * b).coeffs == (0, 0, 3, 6)
    assert a(Fraction(1, 2)) == 2
    z = IntPolynomial.make([])
    assert z.is_zero() and (a * z).is_zero()
    assert (a + z) == a


def test_P_polynomials():
    assert P_poly(1).coeffs == (-1,)
    assert P_poly(2).coeffs == (-2, 1)
    assert P_poly(3).coeffs == (-3, 3, -1)
    # defining identity z P_l(z) + 1 = (1 - z)^l, checked coefficient-wise
    for l in range(1, 11):
        shifted = IntPolynomial.make([0, *P_poly(l).coeffs]) + ONE
        binom = ONE
        for _ in range(l):
            binom = binom * IntPolynomial.make([1, -1])
        assert shifted == binom


def test_f_poly_zero_and_degree():
    for k in range(2, 6):
        for p in enumerate_partitions(k):
            M = p.n_blocks
            for mask in range(1 << M):
                r = [m for m in range(M) if mask >> m & 1]
                f = f_poly(r, p)
                singleton_outside = any(
                    len(p.blocks[m]) == 1 for m in range(M) if m not in r
                )
                if singleton_outside:
                    assert f.is_zero()
                else:
                    assert f.degree == k - M
    with pytest.raises(ValueError):
        f_poly([5], SetPartition.make([(1, 2)]))


def test_distinctness_expansion():
    for k in range(1, 5):
        assert check_distinctness_expansion(k, 4) == 0


def test_partition_lemma_exact():
    for q in (2, 6, 30):
        for k in range(1, 4):
            for p in enumerate_partitions(k):
                for h in (1, 2, 3):
                    assert check_partition_lemma(p, h, q) == 0


def test_partition_lemma_caps():
    p = SetPartition.make([(1,), (2,), (3,), (4,), (5,)])
    with pytest.raises(ValueError):
        check_partition_lemma(p, 2, 6)  # k over cap
    p2 = SetPartition.make([(1, 2)])
    with pytest.raises(ValueError):
        check_partition_lemma(p2, 7, 6)  # h over cap


def test_Rk_identity_exact():
    for q in (2, 6, 30):
        for k in range(1, 5):
            for h in (1, 2, 4):
                assert check_Rk_partition_identity(h, k, q) == 0


def test_main_term_table_k3_is_exact():
    # every term dropped from the k=3 rewriting carries a factor V_1 = 0,
    # so the three tabulated rows reproduce the distinct-tuple value exactly
    t = main_term_table(4, 30, 3)
    assert [r.value for r in t.rows] == [
        Fraction(1, 32),
        Fraction(-777, 32),
        Fraction(77, 2),
    ]
    assert t.total == Fraction(57, 4)
    assert t.r_exact == Fraction(57, 4)
    for q in (2, 6, 30):
        for h in (1, 2, 3, 5):
            t = main_term_table(h, q, 3)
            assert t.total == t.r_exact, (q, h)


def test_main_term_table_k5_frozen():
    # the k=5 rows drop genuinely nonzero contributions, so the total is only
    # an approximation; this pins the exact row values at one grid point
    t = main_term_table(3, 6, 5)
    assert [r.value for r in t.rows] == [0, -270, 0, 900, -720]
    assert t.total == -90
    assert t.r_exact == 0  # no 5 distinct values fit in [1, 3]
    assert isinstance(t, MainTermTable)
    with pytest.raises(ValueError):
        main_term_table(3, 6, 4)


def collect_h_v2_class(k):
    """Contributions to the distinct-tuple rewriting with V_2 and one h power,
    grouped by block shape; returns shape -> polynomial in z."""
    out = {}
    for p in enumerate_partitions(k):
        M = p.n_blocks
        w = w_weight(p)
        for r in itertools.combinations(range(M), 2):
            if M - 2 != 1:
                continue
            f = f_poly(r, p)
            if f.is_zero():
                continue
            shape = tuple(sorted((len(b) for b in p.blocks), reverse=True))
            scaled = IntPolynomial.make([w * c for c in f.coeffs])
            out[shape] = out.get(shape, IntPolynomial.make([])) + scaled
    return out


def test_k5_v2_coefficient_class_derivation():
    # the h V_2 coefficient of the k=5 table: partitions into three blocks,
    # two of them selected; only shapes (2,2,1) and (3,1,1) survive and they
    # contribute -30 (z-1)(z-2) and -20 (z-1)(z-2); the global (-1)^5 flips
    # the sign, giving the tabulated +50 (z-1)(z-2) h V_2
    classes = collect_h_v2_class(5)
    target = IntPolynomial.make([2, -3, 1])  # (z-1)(z-2)
    minus30 = IntPolynomial.make([-30 * c for c in target.coeffs])
    minus20 = IntPolynomial.make([-20 * c for c in target.coeffs])
    assert classes == {(2, 2, 1): minus30, (3, 1, 1): minus20}
    total = classes[(2, 2, 1)] + classes[(3, 1, 1)]
    assert total == IntPolynomial.make([-50 * c for c in target.coeffs])


def test_table_v2_row_matches_derived_coefficient():
    from redres.arith import totient
    from redres.singular import sum_S0_over_tuples

    h, q = 3, 6
    z = Fraction(q, totient(q))
    v2 = sum_S0_over_tuples(h, 2, q)
    t = main_term_table(h, q, 5)
    row = {r.label: r.value for r in t.rows}
    assert row["50 (z-1)(z-2) h V2"] == 50 * (z - 1) * (z - 2) * h * v2
