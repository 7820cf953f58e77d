"""Exact integer and rational primitives shared by every other module.

Everything here is pure and deterministic.  The smallest-prime-factor sieve is
built once on first use and then only read, so all of it is safe to call from
concurrent workers.  Integers are Python ints (arbitrary precision), rationals
are fractions.Fraction; there is no overflow to guard against, only explicit
size caps so that a bad input fails fast instead of grinding.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from functools import lru_cache

SIEVE_LIMIT = 10**6        # smallest-prime-factor table covers 1..SIEVE_LIMIT
FACTORIZE_CAP = 10**12     # trial division beyond the sieve is allowed up to this
PRIMORIAL_Y_CAP = 10**5    # primorial(y) rejected above this

BigRational = Fraction


class BudgetError(ValueError):
    """A requested computation exceeds its configured size or op budget."""


class PrecisionBreach(ArithmeticError):
    """A floating-point evaluation violated its error contract."""


_SPF: list[int] | None = None
_PRIMES: list[int] | None = None


def _spf_table() -> list[int]:
    global _SPF
    if _SPF is None:
        spf = list(range(SIEVE_LIMIT + 1))
        for p in range(2, math.isqrt(SIEVE_LIMIT) + 1):
            if spf[p] == p:
                for m in range(p * p, SIEVE_LIMIT + 1, p):
                    if spf[m] == m:
                        spf[m] = p
        _SPF = spf
    return _SPF


def primes_up_to(y: int) -> list[int]:
    """All primes p <= y, ascending.  Requires y <= SIEVE_LIMIT."""
    if y > SIEVE_LIMIT:
        raise BudgetError(f"primes_up_to supports y <= {SIEVE_LIMIT}, got {y}")
    global _PRIMES
    if _PRIMES is None:
        spf = _spf_table()
        _PRIMES = [n for n in range(2, SIEVE_LIMIT + 1) if spf[n] == n]
    return _PRIMES[: bisect_right(_PRIMES, y)]


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 as (prime, exponent) pairs, primes ascending."""
    if n < 1:
        raise ValueError(f"factorize requires n >= 1, got {n}")
    if n > FACTORIZE_CAP:
        raise BudgetError(f"factorize cap is {FACTORIZE_CAP}, got {n}")
    return list(_factorize_cached(n))


@lru_cache(maxsize=1 << 16)
def _factorize_cached(n: int) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    if n <= SIEVE_LIMIT:
        spf = _spf_table()
        while n > 1:
            p = spf[n]
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return tuple(out)
    m = n
    for p in primes_up_to(SIEVE_LIMIT):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    if m > 1:
        # no prime factor <= sqrt(m) remains, so m is prime
        out.append((m, 1))
    return tuple(out)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n <= SIEVE_LIMIT:
        return _spf_table()[n] == n
    facts = factorize(n)
    return len(facts) == 1 and facts[0][1] == 1


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n, ascending."""
    return [p for p, _ in factorize(n)]


def totient(n: int) -> int:
    phi = n
    for p, _ in factorize(n):
        phi -= phi // p
    return phi


def mobius(n: int) -> int:
    facts = factorize(n)
    if any(e > 1 for _, e in facts):
        return 0
    return -1 if len(facts) % 2 else 1


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n))


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    out = [1]
    for p, e in factorize(n):
        out = [d * p**j for d in out for j in range(e + 1)]
    return sorted(out)


def squarefree_divisors(n: int) -> list[int]:
    """Squarefree positive divisors of n, ascending."""
    out = [1]
    for p in prime_factors(n):
        out = out + [d * p for d in out]
    return sorted(out)


def primorial(y: int) -> int:
    """Product of all primes <= y."""
    if y < 2:
        raise ValueError(f"primorial requires y >= 2, got {y}")
    if y > PRIMORIAL_Y_CAP:
        raise BudgetError(f"primorial cap is y <= {PRIMORIAL_Y_CAP}, got {y}")
    out = 1
    for p in primes_up_to(y):
        out *= p
    return out


def reduce_fraction(num: int, den: int) -> Fraction:
    """num/den in lowest terms with a positive denominator; rejects den < 1."""
    if den < 1:
        raise ValueError(f"denominator must be a positive integer, got {den}")
    return Fraction(num, den)
