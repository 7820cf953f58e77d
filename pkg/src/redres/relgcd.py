"""Relative gcd decompositions of integer tuples.

A k-tuple of positive integers (q_1, ..., q_k) is rewritten as a family of
integers g_I, one per nonempty subset I of {1..k}, such that

    q_i = prod over I containing i of g_I,
    gcd(g_I, g_J) = 1 whenever neither of I, J contains the other.

Subsets are encoded as bitmasks (bit i-1 set means index i is in I).  Two
independent constructions are provided: a prime-local one working on p-adic
valuations and a recursive one working on subset gcds.  They must agree, and
the checks below make that and the coprimality laws testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .arith import factorize, is_squarefree

K_CAP = 16


@dataclass(frozen=True)
class RelGcdDecomposition:
    """Sparse subset-indexed factor map: only entries with g_I > 1 are stored."""

    k: int
    entries: tuple[tuple[int, int], ...]  # (mask, g_I) with g_I > 1, masks ascending

    def g(self, mask: int) -> int:
        if not 0 < mask < (1 << self.k):
            raise ValueError(f"mask {mask} out of range for k={self.k}")
        for m, v in self.entries:
            if m == mask:
                return v
        return 1

    def full_map(self) -> dict[int, int]:
        """g_I for every nonempty subset, including the trivial entries."""
        out = {mask: 1 for mask in range(1, 1 << self.k)}
        out.update(dict(self.entries))
        return out

    def recompose(self) -> tuple[int, ...]:
        q = [1] * self.k
        for mask, v in self.entries:
            for i in range(self.k):
                if mask >> i & 1:
                    q[i] *= v
        return tuple(q)


def _make(k: int, g: dict[int, int]) -> RelGcdDecomposition:
    entries = tuple(sorted((m, v) for m, v in g.items() if v > 1))
    return RelGcdDecomposition(k, entries)


def _validate_tuple(q: Sequence[int]) -> int:
    k = len(q)
    if not 1 <= k <= K_CAP:
        raise ValueError(f"tuple length must be in 1..{K_CAP}, got {k}")
    for x in q:
        if x < 1:
            raise ValueError(f"tuple entries must be positive integers, got {x}")
    return k


def decompose_local(q: Sequence[int]) -> RelGcdDecomposition:
    """Prime-local construction.

    For each prime p dividing some q_i, sort the indices by the exponent of p
    in q_i (stable, so equal exponents keep their original order).  The suffix
    set starting at sorted position j receives p-exponent v_j - v_{j-1} (with
    v_{-1} = 0).  Ties yield exponent zero, so the tie-break can never change
    the result.  All other subsets get exponent zero for p.
    """
    k = _validate_tuple(q)
    per_prime: dict[int, list[int]] = {}
    for i, x in enumerate(q):
        for p, e in factorize(x):
            vals = per_prime.get(p)
            if vals is None:
                vals = per_prime[p] = [0] * k
            vals[i] = e
    g: dict[int, int] = {}
    for p, vals in per_prime.items():
        order = sorted(range(k), key=vals.__getitem__)
        # masks[j] = bitmask of {order[j], order[j+1], ..., order[k-1]}
        masks = [0] * k
        acc = 0
        for j in range(k - 1, -1, -1):
            acc |= 1 << order[j]
            masks[j] = acc
        prev = 0
        for j, i in enumerate(order):
            e = vals[i] - prev
            prev = vals[i]
            if e:
                m = masks[j]
                g[m] = g.get(m, 1) * p**e
    return _make(k, g)


_MASK_ORDER: dict[int, list[int]] = {}


def _mask_order(k: int) -> list[int]:
    order = _MASK_ORDER.get(k)
    if order is None:
        order = sorted(range(1, 1 << k), key=lambda m: -m.bit_count())
        _MASK_ORDER[k] = order
    return order


def decompose_recursive(q: Sequence[int]) -> RelGcdDecomposition:
    """Top-down construction: g_I = gcd(q_i : i in I) / prod of g_J over J strictly
    containing I, processed from large subsets to small.  Every division must be
    exact; a remainder would be an implementation bug and raises.
    """
    k = _validate_tuple(q)
    full = (1 << k) - 1
    # gcd of each subset, built from single bits upward
    G = [0] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        G[mask] = q[i] if rest == 0 else math.gcd(q[i], G[rest])
    g: dict[int, int] = {}
    for mask in _mask_order(k):
        prod = 1
        t = full & ~mask
        s = t
        while s:
            v = g.get(mask | s)
            if v:
                prod *= v
            s = (s - 1) & t
        val = G[mask]
        if prod > 1:
            val, r = divmod(val, prod)
            if r:
                raise ArithmeticError(
                    f"inexact division at subset mask {mask:#b} for q={tuple(q)}"
                )
        if val > 1:
            g[mask] = val
    return _make(k, g)


def recompose(d: RelGcdDecomposition) -> tuple[int, ...]:
    """The original tuple: q_i = prod of g_I over subsets I containing i."""
    return d.recompose()


def check_cross_coprimality(d: RelGcdDecomposition) -> tuple[bool, tuple[int, int] | None]:
    """gcd(g_I, g_J) must be 1 unless I and J are nested.

    Returns (True, None) when the law holds, else (False, (mask_I, mask_J))
    with a witness pair.  Hand-built maps may fail this; both constructions
    always satisfy it.
    """
    ent = d.entries
    for a in range(len(ent)):
        ma, va = ent[a]
        for b in range(a + 1, len(ent)):
            mb, vb = ent[b]
            inter = ma & mb
            if inter == ma or inter == mb:
                continue  # nested
            if math.gcd(va, vb) != 1:
                return False, (ma, mb)
    return True, None


def check_squarefree_pairwise(d: RelGcdDecomposition, q: Sequence[int]) -> bool:
    """For squarefree q_i the nontrivial g_I must be pairwise coprime outright."""
    for x in q:
        if not is_squarefree(x):
            raise ValueError(f"check_squarefree_pairwise requires squarefree inputs, got {x}")
    ent = d.entries
    for a in range(len(ent)):
        for b in range(a + 1, len(ent)):
            if math.gcd(ent[a][1], ent[b][1]) != 1:
                return False
    return True


def mask_to_indices(mask: int) -> tuple[int, ...]:
    """Bitmask to sorted 1-based index tuple, for display."""
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)
