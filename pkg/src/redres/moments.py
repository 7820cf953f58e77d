"""Moments of reduced-residue counts in sliding windows of length h mod q.

The k-th central moment is

    M_k(q, h) = sum_{n=1..q} (Phi(n) - (phi(q)/q) h)^k,
    Phi(n) = #{ n <= m < n+h : gcd(m, q) = 1 },

computed two independent ways: directly (exact rationals, sliding window) and
through an exponential-sum aggregate V_k(q, h) over divisor tuples of q, tied
together by the exact identity M_k = q (phi(q)/q)^k V_k.  A third, fully exact
route evaluates V_k as a sum of refined singular series over [1, h]^k.  Mixed
moments weight the deviation power by a plain window-count power.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import BudgetError, PrecisionBreach, is_squarefree, mobius, totient
from .singular import (
    _squarefree_primes,
    _weight_table,
    sum_S0_over_tuples,
)

M_Q_CAP = 10**6
M_H_CAP = 10**4
M_K_CAP = 8
V_Q_CAP = 10**4
IMAG_TOL = 1e-9
SMOOTH_ROUGH_Q_CAP = 10**5


def _validate_mqhk(q: int, h: int, k: int) -> None:
    if not 1 <= q <= M_Q_CAP:
        raise ValueError(f"q must be in 1..{M_Q_CAP}, got {q}")
    if not is_squarefree(q):
        raise ValueError(f"q must be squarefree, got {q}")
    if not 1 <= h <= M_H_CAP:
        raise ValueError(f"h must be in 1..{M_H_CAP}, got {h}")
    if not 0 <= k <= M_K_CAP:
        raise ValueError(f"k must be in 0..{M_K_CAP}, got {k}")


def _coprime_indicator(q: int) -> list[int]:
    return [1 if math.gcd(r, q) == 1 else 0 for r in range(q)]


def _window_count(prefix: list[int], q: int, phi: int, start: int, h: int) -> int:
    """Number of m in [start, start+h-1] coprime to q, via the period prefix sums."""
    full, rem = divmod(h, q)
    cnt = full * phi
    s = start % q
    e = s + rem
    if e <= q:
        cnt += prefix[e] - prefix[s]
    else:
        cnt += (prefix[q] - prefix[s]) + prefix[e - q]
    return cnt


def M_mixed_direct(q: int, h: int, k1: int, k2: int, workers: int = 1) -> Fraction:
    """sum_n (Phi(n) - (phi/q) h)^k1 * Phi(n)^k2 over n = 1..q, exact.

    Integer accumulation: the deviation is scaled by q so every term is an
    integer, and the single division by q^k1 happens at the end.
    """
    _validate_mqhk(q, h, k1)
    if not 0 <= k2 <= M_K_CAP or k1 + k2 > M_K_CAP:
        raise ValueError(f"moment orders must satisfy 0 <= k1 + k2 <= {M_K_CAP}")
    cop = _coprime_indicator(q)
    phi = sum(cop)
    prefix = [0] * (q + 1)
    for r in range(q):
        prefix[r + 1] = prefix[r] + cop[r]

    def chunk_sum(lo: int, hi: int) -> int:
        # windows starting at n = lo..hi-1
        c = _window_count(prefix, q, phi, lo, h)
        acc = 0
        hphi = h * phi
        for n in range(lo, hi):
            dev = q * c - hphi
            term = dev**k1 if k1 else 1
            if k2:
                term *= c**k2
            acc += term
            c += cop[(n + h) % q] - cop[n % q]
        return acc

    if workers > 1 and q >= 4 * workers:
        bounds = [1 + (q * i) // workers for i in range(workers + 1)]
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(
                ex.map(lambda ab: chunk_sum(*ab), zip(bounds[:-1], bounds[1:]))
            )
        total = sum(parts)
    else:
        total = chunk_sum(1, q + 1)
    return Fraction(total, q**k1)


def M_direct(q: int, h: int, k: int, workers: int = 1) -> Fraction:
    """k-th central moment of the window counts, exact."""
    return M_mixed_direct(q, h, k, 0, workers=workers)


def E_kernel(x: Fraction | int, h: int) -> complex:
    """E(x) = sum_{m=1..h} e(m x), geometric closed form; exactly h at integers.

    Angles are reduced mod 1 exactly before the float step, so precision does
    not degrade with large numerators.
    """
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    x = Fraction(x)
    t = x - math.floor(x)
    if t == 0:
        return complex(h, 0)
    z = cmath.exp(2j * cmath.pi * float(t))
    th = h * x
    th -= math.floor(th)
    zh = cmath.exp(2j * cmath.pi * float(th))
    return z * (zh - 1) / (z - 1)


def F_kernel(x: Fraction | int, h: int) -> Fraction:
    """F(x) = min(h, 1/||x||) with ||x|| the distance to the nearest integer.

    Dominates |E(x)| pointwise; exact rational output.
    """
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    x = Fraction(x)
    t = x - math.floor(x)
    dist = min(t, 1 - t)
    if dist == 0:
        return Fraction(h)
    return min(Fraction(h), 1 / dist)


def _phase_vector(q: int, h: int) -> np.ndarray:
    """Weight vector over residues r mod q: entry r carries mu(den)/phi(den) E(num/den)
    for the reduced form num/den of r/q (zero at r = 0)."""
    num, den = _weight_table(q)
    vec = np.zeros(q, dtype=np.complex128)
    mu_phi = {d: mobius(d) / totient(d) for d in set(den.tolist()) if d > 1}
    for r in range(1, q):
        d = int(den[r])
        vec[r] = mu_phi[d] * E_kernel(Fraction(int(num[r]), d), h)
    return vec


def _cyclic_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    q = len(a)
    full = np.convolve(a, b)
    out = full[:q].copy()
    out[: len(full) - q] += full[q:]
    return out


def V_mixed_expsum(q: int, h: int, k1: int, k2: int) -> float:
    """Divisor-tuple exponential sum V_{k1,k2}(q, h).

    The first k1 coordinates range over divisors > 1 of q with coprime
    numerators, the last k2 also admit the trivial fraction (weight h), and the
    fraction sum must be an integer.  Tuples are grouped by the residue class
    of the running sum (an exact regrouping); the final coordinate is resolved
    by the forced complementary residue, which is the cyclic convolution
    evaluated at class zero.  Raises PrecisionBreach if the imaginary part of
    the result exceeds IMAG_TOL * (1 + |real|).
    """
    _validate_mqhk(q, h, k1)
    if not 0 <= k2 <= M_K_CAP or k1 + k2 > M_K_CAP:
        raise ValueError(f"orders must satisfy 0 <= k1 + k2 <= {M_K_CAP}")
    if q > V_Q_CAP:
        raise BudgetError(f"V cap is q <= {V_Q_CAP}, got {q}")
    if k1 + k2 == 0:
        return 1.0
    strict = _phase_vector(q, h)
    relaxed = strict.copy()
    relaxed[0] += h
    dist = np.zeros(q, dtype=np.complex128)
    dist[0] = 1.0
    for _ in range(k1):
        dist = _cyclic_convolve(dist, strict)
    for _ in range(k2):
        dist = _cyclic_convolve(dist, relaxed)
    val = complex(dist[0])
    if abs(val.imag) > IMAG_TOL * (1 + abs(val.real)):
        raise PrecisionBreach(
            f"imaginary part {val.imag} exceeds tolerance for V(q={q}, h={h})"
        )
    return val.real


def V_expsum(q: int, h: int, k: int) -> float:
    """V_k(q, h) by exponential sums (all coordinates strict)."""
    return V_mixed_expsum(q, h, k, 0)


def V_via_singular(q: int, h: int, k: int, workers: int = 1) -> Fraction:
    """V_k(q, h) as the exact sum of refined singular series over [1, h]^k."""
    _validate_mqhk(q, h, k)
    return sum_S0_over_tuples(h, k, q, workers=workers)


def check_MV_identity(q: int, h: int, k: int, workers: int = 1) -> Fraction:
    """Residual of M_k(q, h) = q (phi(q)/q)^k V_k(q, h) with V_k taken on the
    exact singular-series route; exactly zero for every squarefree q."""
    m = M_direct(q, h, k, workers=workers)
    v = V_via_singular(q, h, k, workers=workers)
    return m - q * Fraction(totient(q), q) ** k * v


def check_mixed_MV_identity(q: int, h: int, k1: int, k2: int) -> float:
    """|M_{k1,k2} - q (phi/q)^(k1+k2) V_{k1,k2}| with V on the float route."""
    m = M_mixed_direct(q, h, k1, k2)
    v = V_mixed_expsum(q, h, k1, k2)
    return abs(float(m) - q * float(Fraction(totient(q), q) ** (k1 + k2)) * v)


def check_r_sum_bound(q: int, k: int) -> tuple[Fraction, Fraction, bool]:
    """Exact check of

        sum over divisor tuples r_1..r_k | q, weighted by prod mu(r_i)^2/phi(r_i),
        of #{b_i in [1, r_i], gcd(b_i, r_i) = 1, sum b_i / r_i integer}
        <= prod over p | q of (1 + 2^k / (p - 1)).

    The left side is evaluated by grouping the (r_i, b_i) enumeration by the
    residue class of the partial fraction sum with a common-denominator integer
    convolution, which is exact.  Returns (lhs, rhs, lhs <= rhs).
    """
    primes = _squarefree_primes(q)
    if len(primes) > 5:
        raise ValueError("r-sum check supports moduli with <= 5 prime factors")
    if not 1 <= k <= 4:
        raise ValueError(f"r-sum check supports k in 1..4, got {k}")
    num, den = _weight_table(q)
    phis = {d: totient(d) for d in set(den.tolist())}
    scale = math.lcm(*phis.values())
    # psi[r] = scale * mu(den)^2 / phi(den); mu^2 = 1 since q is squarefree,
    # and r = 0 is the divisor-1 coordinate with b = 1
    psi = [0] * q
    psi[0] = scale
    for r in range(1, q):
        psi[r] = scale // phis[int(den[r])]
    dist = [0] * q
    dist[0] = 1
    for _ in range(k - 1):
        nxt = [0] * q
        for r, a in enumerate(dist):
            if a:
                for s, b in enumerate(psi):
                    t = r + s
                    if t >= q:
                        t -= q
                    nxt[t] += a * b
        dist = nxt
    lhs_scaled = sum(dist[r] * psi[-r % q] for r in range(q))
    lhs = Fraction(lhs_scaled, scale**k)
    rhs = Fraction(1)
    for p in primes:
        rhs *= 1 + Fraction(2**k, p - 1)
    return lhs, rhs, lhs <= rhs


def check_smooth_rough_decomposition(q1: int, q2: int, h: int, k: int) -> Fraction:
    """Residual of the exact two-modulus moment split for coprime squarefree
    q1, q2 (q = q1 q2):

        M_k(q, h) = sum_{k1+k2=k} C(k, k1) (phi(q2)/q2)^k1
                    * sum_n D1(n mod q1)^k1 D2(n)^k2

    where D1 is the q1-window deviation and D2 the conditional deviation of the
    joint count against (phi(q2)/q2) times the q1-count, both over the window
    m in [n+1, n+h].  Everything is exact rational arithmetic.
    """
    if math.gcd(q1, q2) != 1:
        raise ValueError(f"q1 and q2 must be coprime, got {q1}, {q2}")
    q = q1 * q2
    if q > SMOOTH_ROUGH_Q_CAP:
        raise BudgetError(f"smooth/rough cap is q1*q2 <= {SMOOTH_ROUGH_Q_CAP}")
    _validate_mqhk(q, h, k)

    def window_counts(mod: int, cop: list[int]) -> list[int]:
        # counts over m in [s+1, s+h] for each start s mod `mod`
        phi = sum(cop)
        prefix = [0] * (mod + 1)
        for r in range(mod):
            prefix[r + 1] = prefix[r] + cop[r]
        out = [0] * mod
        c = _window_count(prefix, mod, phi, 1, h)
        for s in range(mod):
            out[s] = c
            c += cop[(s + 1 + h) % mod] - cop[(s + 1) % mod]
        return out

    cop1 = _coprime_indicator(q1)
    cop = _coprime_indicator(q)
    phi1, phi2 = totient(q1), totient(q2)
    w1 = window_counts(q1, cop1)
    w12 = window_counts(q, cop)
    # integer-scaled deviations: A = q1*D1, B = q2*D2
    A = [q1 * w1[s] - h * phi1 for s in range(q1)]
    B = [q2 * w12[n] - phi2 * w1[n % q1] for n in range(q)]
    rhs = Fraction(0)
    for k1 in range(k + 1):
        k2 = k - k1
        s_int = 0
        for n in range(q):
            term = A[n % q1] ** k1 if k1 else 1
            if k2:
                term *= B[n] ** k2
            s_int += term
        rhs += (
            math.comb(k, k1)
            * Fraction(phi2, q2) ** k1
            * Fraction(s_int, q1**k1 * q2**k2)
        )
    return M_direct(q, h, k) - rhs
