"""Singular series of integer tuples, truncated to a squarefree modulus.

For a tuple D = (d_1, ..., d_k) and squarefree q, the truncated series is the
product over primes p | q of (1 - 1/p)^(-k) (1 - nu_p(D)/p), where nu_p(D)
counts distinct residues of D mod p.  The refined variant subtracts all proper
subset contributions by inclusion-exclusion; it can be negative.  Sums of
either quantity over boxes of tuples are the bridge between moment identities
and the distinct-tuple aggregates, so they live here too.
"""

from __future__ import annotations

import cmath
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .arith import (
    BudgetError,
    factorize,
    is_prime,
    mobius,
    primes_up_to,
    totient,
)

TupleD = tuple[int, ...]

K_CAP = 8                  # tuple length cap for series evaluation
D_ABS_CAP = 10**6          # entry magnitude cap
OP_BUDGET = 2 * 10**8      # rough op-count guard for tuple sums
S_INFINITE_P_CAP = 2 * 10**6
EXPANSION_Q_CAP = 10**4


def _validate_tuple(d: Sequence[int], k_cap: int = K_CAP) -> tuple[int, ...]:
    d = tuple(d)
    if len(d) > k_cap:
        raise ValueError(f"tuple length cap is {k_cap}, got {len(d)}")
    for x in d:
        if abs(x) > D_ABS_CAP:
            raise ValueError(f"tuple entries capped at |d| <= {D_ABS_CAP}, got {x}")
    return d


def _squarefree_primes(q: int) -> list[int]:
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    facts = factorize(q)
    if any(e > 1 for _, e in facts):
        raise ValueError(f"modulus must be squarefree, got {q}")
    return [p for p, _ in facts]


def nu_p(d: Sequence[int], p: int) -> int:
    """Number of distinct residues of d mod p."""
    if not is_prime(p):
        raise ValueError(f"nu_p requires a prime, got {p}")
    return len({x % p for x in d})


def S_mod_q(d: Sequence[int], q: int) -> Fraction:
    """prod over p | q of (1 - 1/p)^(-k) (1 - nu_p(d)/p), exact.

    Empty tuples give 1 by convention.  Repeated entries are allowed.
    """
    d = _validate_tuple(d)
    primes = _squarefree_primes(q)
    k = len(d)
    out = Fraction(1)
    for p in primes:
        nu = len({x % p for x in d})
        out *= Fraction(p, p - 1) ** k * Fraction(p - nu, p)
    return out


def S0_mod_q(d: Sequence[int], q: int) -> Fraction:
    """Inclusion-exclusion refinement: sum over subsets T of (+/-) S_mod_q(d_T).

    The sign is (-1)^(k - |T|).  Can be negative; S0 of the empty tuple is 1.
    """
    d = _validate_tuple(d)
    primes = _squarefree_primes(q)
    k = len(d)
    if k == 0:
        return Fraction(1)
    res = [[x % p for x in d] for p in primes]
    # cache (p/(p-1))^j per prime
    pows = [[Fraction(p, p - 1) ** j for j in range(k + 1)] for p in primes]
    total = Fraction(0)
    for mask in range(1 << k):
        idx = [i for i in range(k) if mask >> i & 1]
        j = len(idx)
        term = Fraction(1)
        for pi, p in enumerate(primes):
            nu = len({res[pi][i] for i in idx}) if idx else 0
            term *= pows[pi][j] * Fraction(p - nu, p)
        if (k - j) % 2:
            total -= term
        else:
            total += term
    return total


def S_infinite(d: Sequence[int], p_max: int) -> tuple[float, float]:
    """Truncated infinite-product value plus a rigorous tail bound.

    Requires distinct entries, p_max >= 2k and p_max >= max pairwise spread, so
    that every omitted factor has nu_p = k and the elementary bound
    |log prod_{p > P} factor| <= k^2 sum_{p > P} p^(-2) < k^2 / P applies
    (see README for the derivation).  Returns (value, bound) with the true
    infinite product within value +/- bound.
    """
    d = _validate_tuple(d)
    k = len(d)
    if len(set(d)) != k:
        raise ValueError("S_infinite requires distinct tuple entries")
    if k == 0:
        return 1.0, 0.0
    spread = max(d) - min(d)
    if p_max < max(2 * k, spread, 2):
        raise ValueError(
            f"p_max must be >= max(2k, max pairwise spread) = "
            f"{max(2 * k, spread, 2)}, got {p_max}"
        )
    if p_max > S_INFINITE_P_CAP:
        raise BudgetError(f"S_infinite cap is p_max <= {S_INFINITE_P_CAP}")
    value = 1.0
    for p in primes_up_to(p_max):
        nu = len({x % p for x in d})
        value *= (1.0 - 1.0 / p) ** (-k) * (1.0 - nu / p)
    bound = abs(value) * math.expm1(k * k / p_max)
    return value, bound


def check_repeated_elements(d1: Sequence[int], d2: Sequence[int], q: int) -> Fraction:
    """Residual of S(d2; q) = (q/phi(q))^(k2-k1) S(d1; q), exactly zero when the
    entries of d1 are distinct and the value sets of d1 and d2 coincide."""
    d1 = _validate_tuple(d1)
    d2 = _validate_tuple(d2)
    if len(set(d1)) != len(d1):
        raise ValueError("d1 must have distinct entries")
    if set(d1) != set(d2):
        raise ValueError("d2 must repeat exactly the values of d1")
    if len(d2) < len(d1):
        raise ValueError("d2 cannot be shorter than d1")
    z = Fraction(q, totient(q))
    return S_mod_q(d2, q) - z ** (len(d2) - len(d1)) * S_mod_q(d1, q)


def _weight_table(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-residue reduced fraction data for modulus q: arrays (num, den) with
    r/q = num[r]/den[r] in lowest terms."""
    r = np.arange(q, dtype=np.int64)
    g = np.gcd(r, q)
    g[0] = q
    return r // g, q // g


def check_S0_expansion(d: Sequence[int], q: int) -> float:
    """Exponential-sum evaluation of the refined series against the exact value.

    The expansion sums, over divisor tuples q_i | q with q_i > 1 and numerators
    a_i coprime to q_i whose fraction sum is an integer, the phase
    e(sum d_i a_i / q_i) weighted by prod mu(q_i)/phi(q_i).  Tuples are grouped
    by the running residue class of the partial fraction sum (an exact
    regrouping), so the cost is O(k q^2) instead of the raw tuple count.
    Returns |expansion - exact|.
    """
    d = _validate_tuple(d, k_cap=3)
    primes = _squarefree_primes(q)
    if len(primes) > 4:
        raise ValueError("expansion check supports moduli with <= 4 prime factors")
    if q > EXPANSION_Q_CAP:
        raise BudgetError(f"expansion check cap is q <= {EXPANSION_Q_CAP}")
    k = len(d)
    exact = S0_mod_q(d, q)
    if k == 0:
        return abs(1.0 - float(exact))
    num, den = _weight_table(q)
    mu_phi = {dv: mobius(dv) / totient(dv) for dv in set(den.tolist()) if dv > 1}
    dist = np.zeros(q, dtype=np.complex128)
    dist[0] = 1.0
    for di in d:
        vec = np.zeros(q, dtype=np.complex128)
        for r in range(1, q):
            dn = int(den[r])
            # phase of e(d_i * a / q_i) with a/q_i the reduced form of r/q
            ang = (di * int(num[r])) % dn
            vec[r] = mu_phi[dn] * cmath.exp(2j * cmath.pi * ang / dn)
        full = np.convolve(dist, vec)
        dist = full[:q]
        dist[: len(full) - q] += full[q:]
    return abs(complex(dist[0]) - complex(float(exact)))


def _pattern_key(d: tuple[int, ...], primes: list[int]) -> tuple[int, ...]:
    """Canonical key determining every subset's nu_p: per prime, the equality
    pattern of residues encoded as a restricted-growth label string."""
    key: list[int] = []
    for p in primes:
        labels: dict[int, int] = {}
        for x in d:
            r = x % p
            key.append(labels.setdefault(r, len(labels)))
    return tuple(key)


def _budget_check(h: int, k: int, primes: list[int]) -> None:
    largest = primes[-1] if primes else 2
    est = (h**k) * (2**k) * max(1, len(primes_up_to(largest)))
    if est > OP_BUDGET:
        raise BudgetError(
            f"tuple sum budget exceeded: estimated {est} ops > {OP_BUDGET}"
        )


def _sum_over_tuples(
    h: int, k: int, q: int, refined: bool, distinct: bool, workers: int = 1
) -> Fraction:
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    if not 0 <= k <= K_CAP:
        raise ValueError(f"k must be in 0..{K_CAP}, got {k}")
    primes = _squarefree_primes(q)
    if k == 0:
        return Fraction(1)
    _budget_check(h, k, primes)
    fn = S0_mod_q if refined else S_mod_q
    memo: dict[tuple[int, ...], Fraction] = {}

    def block(first: int) -> Fraction:
        tot = Fraction(0)
        for rest in itertools.product(range(1, h + 1), repeat=k - 1):
            d = (first, *rest)
            if distinct and len(set(d)) != k:
                continue
            key = _pattern_key(d, primes)
            val = memo.get(key)
            if val is None:
                val = fn(d, q)
                memo[key] = val
            tot += val
        return tot

    firsts = range(1, h + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(block, firsts))
    else:
        parts = [block(f) for f in firsts]
    return sum(parts, Fraction(0))


def sum_S0_over_tuples(h: int, k: int, q: int, workers: int = 1) -> Fraction:
    """Sum of the refined series over all k-tuples from [1, h]^k, exact."""
    return _sum_over_tuples(h, k, q, refined=True, distinct=False, workers=workers)


def R_mod_q(h: int, k: int, q: int, workers: int = 1) -> Fraction:
    """Sum of the refined series over distinct k-tuples from [1, h]^k, exact."""
    if k < 1:
        raise ValueError(f"R_mod_q requires k >= 1, got {k}")
    return _sum_over_tuples(h, k, q, refined=True, distinct=True, workers=workers)


def gallagher_ratio(h: int, k: int, q: int, workers: int = 1) -> float:
    """(sum of the plain series over distinct k-tuples in [1, h]^k) / h^k.

    Drifts toward 1 as h grows with q fixed; reported as a float ratio.
    """
    if k < 1:
        raise ValueError(f"gallagher_ratio requires k >= 1, got {k}")
    total = _sum_over_tuples(h, k, q, refined=False, distinct=True, workers=workers)
    return float(total / Fraction(h) ** k)
