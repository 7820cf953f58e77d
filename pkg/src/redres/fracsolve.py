"""Exact counting of solutions to a_1/q_1 + ... + a_k/q_k = target.

Variables are reduced fractions drawn from per-coordinate alphabets (numerator
box, interval, or prescribed numerator sets, always with denominator caps);
the target is "any integer" or a fixed integer.  Counts are exact and come
from two independent engines: a naive one that enumerates every tuple over a
common denominator, and a meet-in-the-middle one that joins two half-sums
through exact dictionaries.  Degenerate zero-sum solutions (some proper
nonempty subset already sums to zero) can be split out, and the shape bounds
used for ratio reporting are provided alongside.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .arith import BudgetError

ALPHABET_CAP = 50_000
K_CAP = 7
CLASSIFY_K_CAP = 5
COUNT_GUARD = 2**63          # reject a priori if the count could reach this
NAIVE_TUPLE_BUDGET = 2 * 10**9
PY_NAIVE_TUPLE_BUDGET = 2 * 10**6
MITM_SIDE_BUDGET = 5 * 10**6
AUTO_NAIVE_LIMIT = 10**6
SUFFIX_CHUNK = 1 << 22

Pair = tuple[int, int]  # (numerator, denominator), reduced, denominator >= 1


@dataclass(frozen=True)
class BoxConstraint:
    """|a_i| <= n, 1 <= q_i <= q_max for every coordinate."""

    k: int
    n: int
    q_max: int
    target: int | None = None  # None means "any integer"


@dataclass(frozen=True)
class IntervalConstraint:
    """a_i/q_i in [lo_i, hi_i] (closed, rational endpoints within [-1, 1]),
    q_i <= cap_i; arity must be odd and each interval at least 1/cap_i wide."""

    intervals: tuple[tuple[Fraction, Fraction], ...]
    q_caps: tuple[int, ...]
    target: int | None = None


@dataclass(frozen=True)
class NumeratorSetConstraint:
    """a_i in B_i with B_i a finite subset of [1, cap_i], q_i <= cap_i."""

    numerator_sets: tuple[tuple[int, ...], ...]
    q_caps: tuple[int, ...]
    target: int | None = None


@dataclass
class CountReport:
    constraint: object
    total: int
    method: str
    elapsed_seconds: float
    degenerate: int | None = None
    non_degenerate: int | None = None


def fractions_in_box(n: int, q_max: int) -> list[Fraction]:
    """All reduced a/q with |a| <= n, 1 <= q <= q_max, sorted ascending.

    Zero appears once, as 0/1 (gcd(0, q) = q rules it out elsewhere).
    """
    if n < 0 or q_max < 1:
        raise ValueError(f"need n >= 0 and q_max >= 1, got n={n}, q_max={q_max}")
    out = []
    for q in range(1, q_max + 1):
        for a in range(-n, n + 1):
            if math.gcd(abs(a), q) == 1:
                out.append(Fraction(a, q))
    if len(out) > ALPHABET_CAP:
        raise BudgetError(f"alphabet cap is {ALPHABET_CAP}, got {len(out)}")
    return sorted(out)


def fractions_in_interval(lo: Fraction, hi: Fraction, q_max: int) -> list[Fraction]:
    """All reduced a/q in the closed interval [lo, hi] with q <= q_max, sorted."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    out = []
    for q in range(1, q_max + 1):
        for a in range(math.ceil(lo * q), math.floor(hi * q) + 1):
            if math.gcd(abs(a), q) == 1:
                out.append(Fraction(a, q))
    if len(out) > ALPHABET_CAP:
        raise BudgetError(f"alphabet cap is {ALPHABET_CAP}, got {len(out)}")
    return sorted(out)


def _pairs(fracs: Sequence[Fraction]) -> list[Pair]:
    return [(f.numerator, f.denominator) for f in fracs]


def _add(a: Pair, b: Pair) -> Pair:
    n = a[0] * b[1] + b[0] * a[1]
    d = a[1] * b[1]
    g = math.gcd(n, d)
    return (n // g, d // g) if g > 1 else (n, d)


def _check_product_guard(alphabets: Sequence[Sequence[Pair]]) -> int:
    prod = 1
    for al in alphabets:
        if not al:
            return 0
        prod *= len(al)
    if prod >= COUNT_GUARD:
        raise BudgetError(f"tuple space {prod} reaches the count guard 2^63")
    return prod


def _naive_counts(
    alphabets: Sequence[Sequence[Pair]],
    targets: Sequence[int | None],
    workers: int = 1,
) -> list[int]:
    """Enumerate every tuple sum over the common denominator and test each target.

    Sums are materialized in numpy int64 blocks (suffix sums tiled once, prefix
    sums looped); falls back to exact Python integers when the scaled values
    could overflow int64.
    """
    prod = _check_product_guard(alphabets)
    if prod == 0:
        return [0] * len(targets)
    if prod > NAIVE_TUPLE_BUDGET:
        raise BudgetError(f"naive budget is {NAIVE_TUPLE_BUDGET} tuples, got {prod}")
    L = math.lcm(*[d for al in alphabets for _, d in al])
    scaled = [[a * (L // d) for a, d in al] for al in alphabets]
    max_total = sum(max(abs(v) for v in vals) for vals in scaled)
    int_targets = [t * L for t in targets if t is not None]
    safe = max(max_total, *(abs(t) for t in int_targets), 1) < 2**62
    if not safe:
        if prod > PY_NAIVE_TUPLE_BUDGET:
            raise BudgetError(
                "naive fallback (exact ints) capped at "
                f"{PY_NAIVE_TUPLE_BUDGET} tuples, got {prod}"
            )
        counts = [0] * len(targets)
        for tup in itertools.product(*scaled):
            s = sum(tup)
            for j, t in enumerate(targets):
                if (s % L == 0) if t is None else (s == t * L):
                    counts[j] += 1
        return counts

    # split into prefix coordinates (looped) and suffix coordinates (tiled)
    k = len(scaled)
    cut = k
    size = 1
    while cut > 1 and size * len(scaled[cut - 1]) <= SUFFIX_CHUNK:
        size *= len(scaled[cut - 1])
        cut -= 1
    suffix = np.zeros(1, dtype=np.int64)
    for vals in reversed(scaled[cut:]):
        arr = np.asarray(vals, dtype=np.int64)
        suffix = (suffix[:, None] + arr[None, :]).ravel()
    suffix_mod = suffix % L
    prefixes = itertools.product(*scaled[:cut]) if cut else [()]

    def scan(chunk: list[tuple[int, ...]]) -> list[int]:
        local = [0] * len(targets)
        for pre in chunk:
            s0 = sum(pre)
            for j, t in enumerate(targets):
                if t is None:
                    local[j] += int(np.count_nonzero(suffix_mod == (-s0) % L))
                else:
                    local[j] += int(np.count_nonzero(suffix == t * L - s0))
        return local

    pres = list(prefixes)
    if workers > 1 and len(pres) >= 2 * workers:
        bounds = [(len(pres) * i) // workers for i in range(workers + 1)]
        chunks = [pres[a:b] for a, b in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(scan, chunks))
    else:
        parts = [scan(pres)]
    return [sum(p[j] for p in parts) for j in range(len(targets))]


def _mitm_counts(
    alphabets: Sequence[Sequence[Pair]],
    targets: Sequence[int | None],
    workers: int = 1,
) -> list[int]:
    """Join exact half-sums: the right half is collapsed into dictionaries keyed
    by exact value and by fractional part, the left half streams against them."""
    if _check_product_guard(alphabets) == 0:
        return [0] * len(targets)
    k = len(alphabets)
    cut = k // 2  # left = alphabets[:cut] (smaller half), right = the rest
    right_size = math.prod(len(al) for al in alphabets[cut:])
    if right_size > MITM_SIDE_BUDGET:
        raise BudgetError(
            f"meet-in-the-middle side budget is {MITM_SIDE_BUDGET}, got {right_size}"
        )
    exact: dict[Pair, int] = {}
    frac: dict[Pair, int] = {}
    want_frac = any(t is None for t in targets)
    want_exact = any(t is not None for t in targets)
    for tup in itertools.product(*alphabets[cut:]):
        s = (0, 1)
        for x in tup:
            s = _add(s, x)
        if want_exact:
            exact[s] = exact.get(s, 0) + 1
        if want_frac:
            fkey = (s[0] % s[1], s[1])
            frac[fkey] = frac.get(fkey, 0) + 1

    def scan(chunk: list[tuple[Pair, ...]]) -> list[int]:
        local = [0] * len(targets)
        for tup in chunk:
            s = (0, 1)
            for x in tup:
                s = _add(s, x)
            a, b = s
            for j, t in enumerate(targets):
                if t is None:
                    local[j] += frac.get(((-a) % b, b), 0)
                else:
                    n = t * b - a
                    g = math.gcd(n, b)
                    local[j] += exact.get((n // g, b // g), 0)
        return local

    lefts = list(itertools.product(*alphabets[:cut])) if cut else [()]
    if workers > 1 and len(lefts) >= 2 * workers:
        bounds = [(len(lefts) * i) // workers for i in range(workers + 1)]
        chunks = [lefts[a:b] for a, b in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(scan, chunks))
    else:
        parts = [scan(lefts)]
    return [sum(p[j] for p in parts) for j in range(len(targets))]


def _count(
    alphabets: list[list[Pair]],
    target: int | None,
    method: str,
    workers: int,
) -> tuple[int, str]:
    if method == "auto":
        prod = 1
        for al in alphabets:
            prod *= max(len(al), 1)
        method = "naive" if prod <= AUTO_NAIVE_LIMIT else "mitm"
    if method == "naive":
        return _naive_counts(alphabets, [target], workers)[0], "naive"
    if method == "mitm":
        return _mitm_counts(alphabets, [target], workers)[0], "meet-in-the-middle"
    raise ValueError(f"unknown method {method!r}")


def _validate_target(target: int | None) -> None:
    if target is not None and not isinstance(target, int):
        raise ValueError(f"target must be None (any integer) or an int, got {target!r}")


def _box_alphabets(c: BoxConstraint) -> list[list[Pair]]:
    if not 1 <= c.k <= K_CAP:
        raise ValueError(f"k must be in 1..{K_CAP}, got {c.k}")
    _validate_target(c.target)
    al = _pairs(fractions_in_box(c.n, c.q_max))
    return [al] * c.k


def count_box(c: BoxConstraint, method: str = "auto", workers: int = 1) -> CountReport:
    """Count k-tuples of reduced fractions with |a_i| <= n, q_i <= q_max whose
    sum hits the target (None = any integer)."""
    t0 = time.perf_counter()
    total, used = _count(_box_alphabets(c), c.target, method, workers)
    return CountReport(c, total, used, time.perf_counter() - t0)


def _interval_alphabets(c: IntervalConstraint) -> list[list[Pair]]:
    arity = len(c.intervals)
    if arity != len(c.q_caps):
        raise ValueError("one denominator cap per interval is required")
    if arity % 2 == 0 or not 1 <= arity <= K_CAP:
        raise ValueError(f"arity must be odd and <= {K_CAP}, got {arity}")
    _validate_target(c.target)
    out = []
    for (lo, hi), cap in zip(c.intervals, c.q_caps):
        lo, hi = Fraction(lo), Fraction(hi)
        if lo < -1 or hi > 1:
            raise ValueError(f"intervals must lie within [-1, 1], got [{lo}, {hi}]")
        if cap < 1:
            raise ValueError(f"denominator caps must be >= 1, got {cap}")
        if hi - lo < Fraction(1, cap):
            raise ValueError(
                f"interval [{lo}, {hi}] narrower than 1/cap = 1/{cap}"
            )
        out.append(_pairs(fractions_in_interval(lo, hi, cap)))
    return out


def count_interval(
    c: IntervalConstraint, method: str = "auto", workers: int = 1
) -> CountReport:
    """Count tuples with a_i/q_i in the i-th closed interval, q_i <= cap_i."""
    t0 = time.perf_counter()
    total, used = _count(_interval_alphabets(c), c.target, method, workers)
    return CountReport(c, total, used, time.perf_counter() - t0)


def _numerator_set_alphabets(c: NumeratorSetConstraint) -> list[list[Pair]]:
    arity = len(c.numerator_sets)
    if arity != len(c.q_caps):
        raise ValueError("one denominator cap per numerator set is required")
    if arity % 2 == 0 or not 1 <= arity <= K_CAP:
        raise ValueError(f"arity must be odd and <= {K_CAP}, got {arity}")
    _validate_target(c.target)
    out = []
    for bs, cap in zip(c.numerator_sets, c.q_caps):
        if cap < 1:
            raise ValueError(f"denominator caps must be >= 1, got {cap}")
        if not bs:
            raise ValueError("numerator sets must be non-empty")
        if any(not 1 <= b <= cap for b in bs):
            raise ValueError(f"numerator sets must lie in [1, {cap}], got {bs}")
        al = [
            (b, q)
            for b in sorted(set(bs))
            for q in range(1, cap + 1)
            if math.gcd(b, q) == 1
        ]
        if len(al) > ALPHABET_CAP:
            raise BudgetError(f"alphabet cap is {ALPHABET_CAP}, got {len(al)}")
        out.append(al)
    return out


def count_numerator_sets(
    c: NumeratorSetConstraint, method: str = "auto", workers: int = 1
) -> CountReport:
    """Count tuples of reduced pairs (a_i, q_i) with a_i in B_i, q_i <= cap_i."""
    t0 = time.perf_counter()
    total, used = _count(_numerator_set_alphabets(c), c.target, method, workers)
    return CountReport(c, total, used, time.perf_counter() - t0)


def iter_solutions(
    alphabets: Sequence[Sequence[Pair]], target: int | None
) -> Iterator[tuple[Pair, ...]]:
    """Yield every solution tuple by streaming prefixes against a dictionary of
    the final coordinate (keyed by fractional part for the any-integer target)."""
    if any(not al for al in alphabets):
        return
    k = len(alphabets)
    last: dict[Pair, list[Pair]] = {}
    for x in alphabets[-1]:
        key = (x[0] % x[1], x[1]) if target is None else x
        last.setdefault(key, []).append(x)
    for pre in itertools.product(*alphabets[:-1]):
        s = (0, 1)
        for x in pre:
            s = _add(s, x)
        a, b = s
        if target is None:
            for x in last.get(((-a) % b, b), ()):
                yield pre + (x,)
        else:
            n = target * b - a
            g = math.gcd(n, b)
            for x in last.get((n // g, b // g), ()):
                yield pre + (x,)


def classify_degenerate(c: BoxConstraint, workers: int = 1) -> CountReport:
    """Split the zero-target solution count into degenerate tuples (some proper
    nonempty subset of the fractions sums to zero; any zero entry qualifies via
    its singleton) and the rest.  Exact enumeration."""
    if c.target != 0:
        raise ValueError("degeneracy classification is defined for target zero")
    if not 1 <= c.k <= CLASSIFY_K_CAP:
        raise ValueError(f"classification cap is k <= {CLASSIFY_K_CAP}")
    t0 = time.perf_counter()
    alphabets = _box_alphabets(c)
    _check_product_guard(alphabets)
    L = math.lcm(*[d for _, d in alphabets[0]]) if alphabets[0] else 1
    k = c.k
    masks = [m for m in range(1, 1 << k) if m.bit_count() < k]
    deg = 0
    total = 0
    for sol in iter_solutions(alphabets, 0):
        total += 1
        v = [a * (L // d) for a, d in sol]
        for m in masks:
            s = 0
            for i in range(k):
                if m >> i & 1:
                    s += v[i]
            if s == 0:
                deg += 1
                break
    return CountReport(
        c,
        total,
        "naive",
        time.perf_counter() - t0,
        degenerate=deg,
        non_degenerate=total - deg,
    )


def reference_bounds(
    c: BoxConstraint | IntervalConstraint | NumeratorSetConstraint,
) -> dict[str, object]:
    """Shape references used for ratio reporting (no constants, no assertions).

    Box: n^((k+1)/2) Q^((k-1)/2) (upper shape), n^2 Q (k=3 lower-bound shape),
    n^(k-1) Q (non-degenerate heuristic).  Interval: min over choices of k+1
    coordinates X (arity 2k+1) of prod_{i in X} width_i * prod_all caps.
    Numerator sets: min over X of prod_{i in X} |B_i| * prod_{j not in X} cap_j.
    """
    if isinstance(c, BoxConstraint):
        k, n, q = c.k, c.n, c.q_max
        if k % 2:
            upper: object = n ** ((k + 1) // 2) * q ** ((k - 1) // 2)
        else:
            upper = float(n) ** ((k + 1) / 2) * float(q) ** ((k - 1) / 2)
        out: dict[str, object] = {"upper_shape": upper}
        if k == 3:
            out["lower_shape_k3"] = n * n * q
        out["nondegenerate_heuristic"] = n ** (k - 1) * q
        return out
    if isinstance(c, IntervalConstraint):
        arity = len(c.intervals)
        kk = (arity - 1) // 2
        widths = [Fraction(hi) - Fraction(lo) for lo, hi in c.intervals]
        cap_prod = math.prod(c.q_caps)
        best = None
        best_x = None
        for x in itertools.combinations(range(arity), kk + 1):
            val = cap_prod * math.prod((widths[i] for i in x), start=Fraction(1))
            if best is None or val < best:
                best, best_x = val, x
        return {"upper_shape": best, "minimizing_coordinates": best_x}
    if isinstance(c, NumeratorSetConstraint):
        arity = len(c.numerator_sets)
        kk = (arity - 1) // 2
        sizes = [len(set(b)) for b in c.numerator_sets]
        best = None
        best_x = None
        for x in itertools.combinations(range(arity), kk + 1):
            xs = set(x)
            val = math.prod(
                sizes[i] if i in xs else c.q_caps[i] for i in range(arity)
            )
            if best is None or val < best:
                best, best_x = val, x
        return {"upper_shape": best, "minimizing_coordinates": best_x}
    raise ValueError(f"unsupported constraint {type(c).__name__}")
