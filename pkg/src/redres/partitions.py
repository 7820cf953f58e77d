"""Set-partition combinatorics behind the distinct-tuple aggregates.

The indicator that a k-tuple has pairwise distinct entries expands over set
partitions P of {1..k} with integer weights w(P); each weight is also a signed
count of graphs whose connected components are exactly the blocks of P.  The
polynomials P_l(z) = ((1-z)^l - 1)/z and their block products f_{R,P} turn
per-partition tuple sums into combinations of the box aggregates V_j, giving an
exact rewriting of the distinct-tuple sum R_k(h) mod q.  Everything here is
integer or rational arithmetic; the identity checks return exact residuals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import totient
from .singular import R_mod_q, S_mod_q, _squarefree_primes, sum_S0_over_tuples

K_CAP = 8
BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140]
BRUTE_EDGE_CAP = 24
LEMMA_H_CAP = 6
LEMMA_K_CAP = 4


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial, ascending coefficients, no trailing zeros."""

    coeffs: tuple[int, ...]

    @staticmethod
    def make(coeffs: Iterable[int]) -> "IntPolynomial":
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        return IntPolynomial(tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            a[i] += c
        return IntPolynomial.make(a)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if self.is_zero() or other.is_zero():
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial.make(out)

    def __call__(self, z: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc


ONE = IntPolynomial((1,))


@dataclass(frozen=True)
class SetPartition:
    """Partition of {1..k}: blocks sorted internally, ordered by minimum."""

    blocks: tuple[tuple[int, ...], ...]

    @staticmethod
    def make(blocks: Iterable[Iterable[int]]) -> "SetPartition":
        raw = [tuple(sorted(b)) for b in blocks]
        if any(not b for b in raw):
            raise ValueError("empty block")
        bl = tuple(sorted(raw, key=lambda b: b[0]))
        seen: set[int] = set()
        for b in bl:
            if seen & set(b):
                raise ValueError(f"blocks overlap: {bl}")
            seen |= set(b)
        k = max(seen) if seen else 0
        if seen != set(range(1, k + 1)):
            raise ValueError(f"blocks must cover 1..k exactly, got {bl}")
        return SetPartition(bl)

    @property
    def k(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_index_of(self, i: int) -> int:
        for m, b in enumerate(self.blocks):
            if i in b:
                return m
        raise ValueError(f"index {i} not in partition")

    def is_constant_on_blocks(self, d: Sequence[int]) -> bool:
        """The indicator Delta_P(d): d is constant within each block (1-based d)."""
        for b in self.blocks:
            v = d[b[0] - 1]
            if any(d[i - 1] != v for i in b[1:]):
                return False
        return True


def enumerate_partitions(k: int) -> list[SetPartition]:
    """All partitions of {1..k} in restricted-growth order; Bell(k) of them."""
    if not 1 <= k <= K_CAP:
        raise ValueError(f"k must be in 1..{K_CAP}, got {k}")
    out: list[SetPartition] = []

    def rec(i: int, blocks: list[list[int]]) -> None:
        if i > k:
            out.append(SetPartition.make([tuple(b) for b in blocks]))
            return
        for b in blocks:
            b.append(i)
            rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        rec(i + 1, blocks)
        blocks.pop()

    rec(1, [])
    return out


def w_weight(p: SetPartition) -> int:
    """prod over blocks of (-1)^(|S|-1) (|S|-1)!."""
    out = 1
    for b in p.blocks:
        s = len(b)
        f = math.factorial(s - 1)
        out *= -f if (s - 1) % 2 else f
    return out


def w_weight_bruteforce(p: SetPartition) -> int:
    """Signed graph count: sum of (-1)^(#edges) over graphs on {1..k} whose
    edges stay inside blocks and whose components are exactly the blocks.
    Factorizes over blocks, so each block's connected-graph signed count is
    enumerated by brute force over its edge subsets.
    """
    if sum(math.comb(len(b), 2) for b in p.blocks) > BRUTE_EDGE_CAP:
        raise ValueError(f"brute-force edge budget is {BRUTE_EDGE_CAP} slots")
    total = 1
    for b in p.blocks:
        s = len(b)
        edges = list(itertools.combinations(range(s), 2))
        acc = 0
        for picked in itertools.chain.from_iterable(
            itertools.combinations(edges, t) for t in range(len(edges) + 1)
        ):
            parent = list(range(s))

            def find(x: int) -> int:
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for u, v in picked:
                parent[find(u)] = find(v)
            if len({find(x) for x in range(s)}) == 1:
                acc += -1 if len(picked) % 2 else 1
        total *= acc
    return total


def P_poly(l: int) -> IntPolynomial:
    """P_l(z) = ((1 - z)^l - 1) / z, an integer polynomial of degree l - 1."""
    if l < 1:
        raise ValueError(f"P_poly requires l >= 1, got {l}")
    return IntPolynomial.make(
        [(-1) ** j * math.comb(l, j) for j in range(1, l + 1)]
    )


def f_poly(r_blocks: Iterable[int], p: SetPartition) -> IntPolynomial:
    """f_{R,P}(z) = prod_{m in R} P_{|S_m|}(z) * prod_{m not in R} (1 + P_{|S_m|}(z)).

    R is given as 0-based block indices into p.blocks.  Zero exactly when some
    singleton block lies outside R; otherwise degree k - n_blocks.
    """
    rset = set(r_blocks)
    if any(not 0 <= m < p.n_blocks for m in rset):
        raise ValueError("R must index blocks of the partition")
    out = ONE
    for m, b in enumerate(p.blocks):
        pl = P_poly(len(b))
        out = out * (pl if m in rset else pl + ONE)
        if out.is_zero():
            return out
    return out


def check_distinctness_expansion(k: int, h: int) -> int:
    """Exhaustive check that sum over partitions of w(P) Delta_P(d) equals the
    distinctness indicator for every d in [1, h]^k.  Returns the number of
    mismatches (0 when the identity holds)."""
    parts = enumerate_partitions(k)
    weights = [w_weight(p) for p in parts]
    bad = 0
    for d in itertools.product(range(1, h + 1), repeat=k):
        lhs = sum(
            w for p, w in zip(parts, weights) if p.is_constant_on_blocks(d)
        )
        if lhs != (1 if len(set(d)) == k else 0):
            bad += 1
    return bad


def check_partition_lemma(p: SetPartition, h: int, q: int) -> Fraction:
    """Exact residual of the per-partition rewriting

        sum_{d in [1,h]^k, Delta_P(d)} sum_{T subset of {1..k}} (-1)^|T| S(d_T; q)
      = sum_{e in [1,h]^M} sum_{J subset of blocks}
            prod_{m in J} P_{|S_m|}(q/phi(q)) * S(e_J; q)

    where M is the block count and e_J picks the block values indexed by J.
    """
    k, M = p.k, p.n_blocks
    if k > LEMMA_K_CAP or h > LEMMA_H_CAP:
        raise ValueError(f"partition lemma caps: k <= {LEMMA_K_CAP}, h <= {LEMMA_H_CAP}")
    _squarefree_primes(q)  # validates q
    z = Fraction(q, totient(q))
    s_cache: dict[tuple[int, ...], Fraction] = {}

    def s_of(t: tuple[int, ...]) -> Fraction:
        v = s_cache.get(t)
        if v is None:
            v = s_cache[t] = S_mod_q(t, q)
        return v

    block_of = [p.block_index_of(i) for i in range(1, k + 1)]
    lhs = Fraction(0)
    for e in itertools.product(range(1, h + 1), repeat=M):
        d = tuple(e[block_of[i]] for i in range(k))
        for mask in range(1 << k):
            t = tuple(d[i] for i in range(k) if mask >> i & 1)
            if mask.bit_count() % 2:
                lhs -= s_of(t)
            else:
                lhs += s_of(t)
    pvals = [P_poly(len(b))(z) for b in p.blocks]
    rhs = Fraction(0)
    for e in itertools.product(range(1, h + 1), repeat=M):
        for mask in range(1 << M):
            coeff = Fraction(1)
            t = []
            for m in range(M):
                if mask >> m & 1:
                    coeff *= pvals[m]
                    t.append(e[m])
            rhs += coeff * s_of(tuple(t))
    return lhs - rhs


def check_Rk_partition_identity(h: int, k: int, q: int, workers: int = 1) -> Fraction:
    """Exact residual of the closed rewriting of the distinct-tuple aggregate:

        R_k(h) mod q = (-1)^k sum over partitions P of w(P) *
                       sum over block subsets R of
                           f_{R,P}(q/phi(q)) h^(M-|R|) V_{|R|}(q, h)

    with V_j the exact box aggregate (V_0 = 1).  Zero for every squarefree q.
    """
    if k > LEMMA_K_CAP or h > LEMMA_H_CAP:
        raise ValueError(f"identity caps: k <= {LEMMA_K_CAP}, h <= {LEMMA_H_CAP}")
    lhs = R_mod_q(h, k, q, workers=workers)
    z = Fraction(q, totient(q))
    v = [sum_S0_over_tuples(h, j, q, workers=workers) for j in range(k + 1)]
    rhs = Fraction(0)
    for p in enumerate_partitions(k):
        M = p.n_blocks
        w = w_weight(p)
        for mask in range(1 << M):
            r_blocks = [m for m in range(M) if mask >> m & 1]
            f = f_poly(r_blocks, p)
            if f.is_zero():
                continue
            rhs += w * f(z) * Fraction(h) ** (M - len(r_blocks)) * v[len(r_blocks)]
    if k % 2:
        rhs = -rhs
    return lhs - rhs


@dataclass(frozen=True)
class MainTermRow:
    label: str
    value: Fraction


@dataclass(frozen=True)
class MainTermTable:
    k: int
    h: int
    q: int
    rows: tuple[MainTermRow, ...]
    total: Fraction
    r_exact: Fraction


def main_term_table(h: int, q: int, k: int, workers: int = 1) -> MainTermTable:
    """Report-only evaluation of the leading combinations for k = 3 or 5.

    With z = q/phi(q) and V_j = V_j(q, h):

      k=3:  V_3  - 3 (z-2) V_2  + 2 (z-1)(z-2) h
      k=5:  V_5  - 10 (z-2) V_4  - 10 (z-1) h V_3
            + 50 (z-1)(z-2) h V_2  - 20 (z-1)^2 (z-2) h^2

    The V_2 coefficient 50 comes from the partition classes themselves (pairs
    plus one adjoined pair contribute 30, a single triple contributes 20); see
    tests for the class-by-class derivation.  No error bound is asserted, the
    exact distinct-tuple value rides along for comparison.
    """
    if k not in (3, 5):
        raise ValueError(f"main terms are tabulated for k in (3, 5), got {k}")
    z = Fraction(q, totient(q))
    v = {j: sum_S0_over_tuples(h, j, q, workers=workers) for j in range(k + 1)}
    if k == 3:
        rows = (
            MainTermRow("V3", v[3]),
            MainTermRow("-3 (z-2) V2", -3 * (z - 2) * v[2]),
            MainTermRow("2 (z-1)(z-2) h", 2 * (z - 1) * (z - 2) * h),
        )
    else:
        rows = (
            MainTermRow("V5", v[5]),
            MainTermRow("-10 (z-2) V4", -10 * (z - 2) * v[4]),
            MainTermRow("-10 (z-1) h V3", -10 * (z - 1) * h * v[3]),
            MainTermRow("50 (z-1)(z-2) h V2", 50 * (z - 1) * (z - 2) * h * v[2]),
            MainTermRow("-20 (z-1)^2 (z-2) h^2", -20 * (z - 1) ** 2 * (z - 2) * h**2),
        )
    total = sum((r.value for r in rows), Fraction(0))
    return MainTermTable(k, h, q, rows, total, R_mod_q(h, k, q, workers=workers))
