"""Invariant suites runnable from the CLI (redres verify) and from the tests.

Each suite sweeps a documented grid at one of two levels: "quick" keeps the
whole run under a minute, "full" runs the complete grids with their stated
runtime budgets.  A suite returns the number of checks performed and a list of
failure descriptions (empty on success); nothing is tolerance-fudged, exact
residuals are compared against exactly zero and float routes against their
documented tolerances.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import fracsolve, moments, partitions, relgcd, singular
from .arith import is_squarefree, primorial, totient

FLOAT_TOL = 1e-9


@dataclass
class SuiteResult:
    name: str
    checks: int
    failures: list[str]
    elapsed_seconds: float

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        msg = f"{status} {self.name} ({self.checks} checks, {self.elapsed_seconds:.2f}s)"
        if self.failures:
            msg += f" [{len(self.failures)} failures; first: {self.failures[0]}]"
        return msg


def _relgcd_laws(level: str) -> tuple[int, list[str]]:
    q_cap = 30 if level == "full" else 10
    k_max = 4 if level == "full" else 3
    checks = 0
    fails: list[str] = []
    sf = [False] + [is_squarefree(x) for x in range(1, q_cap + 1)]
    for k in range(1, k_max + 1):
        for q in itertools.product(range(1, q_cap + 1), repeat=k):
            d1 = relgcd.decompose_local(q)
            d2 = relgcd.decompose_recursive(q)
            if d1 != d2:
                fails.append(f"local/recursive disagree at {q}")
            if d1.recompose() != q:
                fails.append(f"roundtrip failed at {q}")
            ok, wit = relgcd.check_cross_coprimality(d1)
            if not ok:
                fails.append(f"cross-coprimality failed at {q}, witness {wit}")
            if all(sf[x] for x in q) and not relgcd.check_squarefree_pairwise(d1, q):
                fails.append(f"squarefree pairwise coprimality failed at {q}")
            checks += 1
            if fails and len(fails) > 5:
                return checks, fails
    return checks, fails


def _counting_oracle(level: str) -> tuple[int, list[str]]:
    if level == "full":
        ks, ns, qs = (3, 5), range(1, 5), range(1, 9)
    else:
        ks, ns, qs = (3,), range(1, 3), range(1, 5)
    targets: list[int | None] = [None, 0, 1]
    checks = 0
    fails: list[str] = []
    for n in ns:
        for q_max in qs:
            alpha = fracsolve._pairs(fracsolve.fractions_in_box(n, q_max))
            for k in ks:
                als = [alpha] * k
                a = fracsolve._naive_counts(als, targets)
                b = fracsolve._mitm_counts(als, targets)
                for t, ca, cb in zip(targets, a, b):
                    checks += 1
                    if ca != cb:
                        fails.append(
                            f"naive {ca} != mitm {cb} at k={k} n={n} Q={q_max} target={t}"
                        )
    return checks, fails


def _singleton_forcing(level: str) -> tuple[int, list[str]]:
    bound = 10 if level == "full" else 6
    alpha = fracsolve._pairs(fracsolve.fractions_in_box(bound, bound))
    seen: set[tuple[int, ...]] = set()
    n_solutions = 0
    for sol in fracsolve.iter_solutions([alpha] * 3, None):
        n_solutions += 1
        seen.add(tuple(d for _, d in sol))
    fails: list[str] = []
    for dens in sorted(seen):
        d = relgcd.decompose_local(dens)
        for i in range(3):
            if d.g(1 << i) != 1:
                fails.append(f"singleton factor {d.g(1 << i)} at denominators {dens}")
    # every solution was checked through its denominator triple
    return n_solutions, fails


def _mv_identity(level: str) -> tuple[int, list[str]]:
    if level == "full":
        q_list, h_max, k_max = (2, 6, 30, 210), 6, 4
    else:
        q_list, h_max, k_max = (2, 6, 30), 3, 3
    checks = 0
    fails: list[str] = []
    for q in q_list:
        for h in range(1, h_max + 1):
            for k in range(k_max + 1):
                r = moments.check_MV_identity(q, h, k)
                checks += 1
                if r != 0:
                    fails.append(f"identity residual {r} at q={q} h={h} k={k}")
    return checks, fails


def _dual_v(level: str) -> tuple[int, list[str]]:
    if level == "full":
        q_list, h_max, k_max = (2, 6, 30, 210), 6, 4
    else:
        q_list, h_max, k_max = (2, 6, 30), 3, 3
    checks = 0
    fails: list[str] = []
    for q in q_list:
        for h in range(1, h_max + 1):
            for k in range(1, k_max + 1):
                a = moments.V_expsum(q, h, k)
                b = float(moments.V_via_singular(q, h, k))
                checks += 1
                if abs(a - b) > FLOAT_TOL * (1 + abs(b)):
                    fails.append(f"V routes differ {a} vs {b} at q={q} h={h} k={k}")
    return checks, fails


def _r_sum_bound(level: str) -> tuple[int, list[str]]:
    q_list = (2, 3, 5, 6, 10, 15, 30, 210) if level == "full" else (2, 3, 6, 30)
    checks = 0
    fails: list[str] = []
    for q in q_list:
        for k in range(1, 5):
            lhs, rhs, holds = moments.check_r_sum_bound(q, k)
            checks += 1
            if not holds:
                fails.append(f"r-sum bound violated at q={q} k={k}: {lhs} > {rhs}")
    return checks, fails


def _smooth_rough(level: str) -> tuple[int, list[str]]:
    pairs = ((2, 3), (6, 35), (10, 21)) if level == "full" else ((2, 3), (6, 35))
    h_max = 4 if level == "full" else 3
    k_max = 3
    checks = 0
    fails: list[str] = []
    for q1, q2 in pairs:
        for h in range(1, h_max + 1):
            for k in range(k_max + 1):
                r = moments.check_smooth_rough_decomposition(q1, q2, h, k)
                checks += 1
                if r != 0:
                    fails.append(
                        f"smooth/rough residual {r} at q1={q1} q2={q2} h={h} k={k}"
                    )
    return checks, fails


def _singular_identities(level: str) -> tuple[int, list[str]]:
    checks = 0
    fails: list[str] = []
    q_list = (2, 6, 30, 210) if level == "full" else (2, 6, 30)

    # repeated-elements law
    rep_cases = [
        ((0,), (0, 0)),
        ((0,), (0, 0, 0)),
        ((0, 2), (0, 2, 2)),
        ((0, 2), (2, 0, 2, 0)),
        ((1, 3, 4), (1, 3, 4, 3)),
    ]
    for q in q_list:
        for d1, d2 in rep_cases:
            r = singular.check_repeated_elements(d1, d2, q)
            checks += 1
            if r != 0:
                fails.append(f"repeated-elements residual {r} at q={q} d2={d2}")

    # duality: plain series is the subset sum of refined ones
    tuples = [(0,), (0, 2), (1, 2, 4), (0, 1, 2, 3)]
    for q in q_list:
        for d in tuples:
            k = len(d)
            total = Fraction(0)
            for mask in range(1 << k):
                sub = tuple(d[i] for i in range(k) if mask >> i & 1)
                total += singular.S0_mod_q(sub, q)
            checks += 1
            if total != singular.S_mod_q(d, q):
                fails.append(f"duality failed at q={q} d={d}")

    # permutation and translation invariance
    for q in q_list:
        for d in [(0, 2), (1, 5, 6), (0, 1, 2, 4)]:
            base = singular.S0_mod_q(d, q)
            for perm in itertools.permutations(d):
                checks += 1
                if singular.S0_mod_q(perm, q) != base:
                    fails.append(f"S0 not permutation invariant at q={q} d={d}")
                    break
            checks += 1
            if singular.S_mod_q(tuple(x + 7 for x in d), q) != singular.S_mod_q(d, q):
                fails.append(f"S not translation invariant at q={q} d={d}")

    # non-negativity of the plain series, a negative refined witness
    for q in q_list:
        for d in tuples:
            checks += 1
            if singular.S_mod_q(d, q) < 0:
                fails.append(f"plain series negative at q={q} d={d}")
    checks += 1
    if not singular.S0_mod_q((0, 1), 2) < 0:
        fails.append("expected a negative refined value at d=(0,1) q=2")

    # multiplicativity over coprime moduli
    for q1, q2 in [(2, 3), (6, 35), (10, 21)]:
        for d in tuples:
            checks += 1
            if singular.S_mod_q(d, q1 * q2) != singular.S_mod_q(d, q1) * singular.S_mod_q(d, q2):
                fails.append(f"multiplicativity failed at q1={q1} q2={q2} d={d}")

    # exponential-sum expansion of the refined series
    exp_tuples = [(0,), (3,), (0, 2), (1, 4), (0, 2, 6), (1, 2, 3)]
    for q in q_list:
        for d in exp_tuples:
            r = singular.check_S0_expansion(d, q)
            checks += 1
            if r > FLOAT_TOL * (1 + abs(float(singular.S0_mod_q(d, q)))):
                fails.append(f"expansion residual {r} at q={q} d={d}")

    # truncated product vs exact truncation, and the tail-bound contract
    v, bound = singular.S_infinite((0, 2), 30)
    checks += 1
    if abs(v - float(singular.S_mod_q((0, 2), primorial(30)))) > 1e-12:
        fails.append("truncated product disagrees with exact truncation at P=30")
    if level == "full":
        v, bound = singular.S_infinite((0, 2), 10**5)
        checks += 1
        if abs(v - 1.3203236316) > bound:
            fails.append(
                f"twin-tuple product {v} not within tail bound {bound} of reference"
            )
    return checks, fails


def _partition_identities(level: str) -> tuple[int, list[str]]:
    checks = 0
    fails: list[str] = []
    q_list = (2, 6, 30) if level == "full" else (2, 6)
    k_max = 4 if level == "full" else 3
    h_lemma = 4 if level == "full" else 3
    h_identity = 5 if level == "full" else 3

    for k in range(1, k_max + 1):
        mism = partitions.check_distinctness_expansion(k, 4)
        checks += 1
        if mism:
            fails.append(f"distinctness expansion has {mism} mismatches at k={k}")

    for q in q_list:
        for k in range(1, k_max + 1):
            for p in partitions.enumerate_partitions(k):
                for h in range(1, h_lemma + 1):
                    r = partitions.check_partition_lemma(p, h, q)
                    checks += 1
                    if r != 0:
                        fails.append(
                            f"partition lemma residual {r} at q={q} h={h} P={p.blocks}"
                        )
                        if len(fails) > 5:
                            return checks, fails

    for q in q_list:
        for k in range(1, k_max + 1):
            for h in range(1, h_identity + 1):
                r = partitions.check_Rk_partition_identity(h, k, q)
                checks += 1
                if r != 0:
                    fails.append(f"distinct-tuple identity residual {r} at q={q} h={h} k={k}")

    # the k=3 table is exact (every dropped term carries V_1 = 0)
    for q in q_list:
        for h in range(1, h_identity + 1):
            t = partitions.main_term_table(h, q, 3)
            checks += 1
            if t.total != t.r_exact:
                fails.append(f"k=3 term table not exact at q={q} h={h}")
    return checks, fails


def _w_weights(level: str) -> tuple[int, list[str]]:
    k_max = 6 if level == "full" else 5
    checks = 0
    fails: list[str] = []
    for k in range(1, k_max + 1):
        for p in partitions.enumerate_partitions(k):
            checks += 1
            if partitions.w_weight(p) != partitions.w_weight_bruteforce(p):
                fails.append(f"weight mismatch at {p.blocks}")
    # closed-form special shapes: j pairs (+ singletons) give (-1)^j, adding one
    # triple doubles the magnitude
    for j in range(0, 3):
        blocks = [(2 * i + 1, 2 * i + 2) for i in range(j)]
        nxt = 2 * j + 1
        blocks.append((nxt,))
        p = partitions.SetPartition.make(blocks)
        checks += 1
        if partitions.w_weight(p) != (-1) ** j:
            fails.append(f"pair-shape weight wrong at j={j}")
        blocks2 = [(2 * i + 1, 2 * i + 2) for i in range(j)]
        blocks2.append((2 * j + 1, 2 * j + 2, 2 * j + 3))
        p2 = partitions.SetPartition.make(blocks2)
        checks += 1
        if partitions.w_weight(p2) != 2 * (-1) ** j:
            fails.append(f"triple-shape weight wrong at j={j}")
    return checks, fails


def _scaling(level: str) -> tuple[int, list[str]]:
    if level == "full":
        ns, qs = (2, 4, 8), (8, 16, 32)
        gal_h, gal_y = (4, 8, 12), 30
    else:
        ns, qs = (2, 4), (8, 16)
        gal_h, gal_y = (4, 8), 30
    checks = 0
    fails: list[str] = []
    ratios = {}
    counts = {}
    for n in ns:
        for q_max in qs:
            rep = fracsolve.count_box(fracsolve.BoxConstraint(3, n, q_max), method="mitm")
            counts[(n, q_max)] = rep.total
            ratios[(n, q_max)] = rep.total / (n * n * q_max)
    med = sorted(ratios.values())[len(ratios) // 2]
    for key, r in ratios.items():
        checks += 1
        if not (med / 50 <= r <= med * 50):
            fails.append(f"scaling ratio {r:.3g} at (n,Q)={key} outside 50x of median {med:.3g}")
    for n in ns:
        seq = [counts[(n, q)] for q in qs]
        checks += 1
        if any(b < a for a, b in zip(seq, seq[1:])):
            fails.append(f"count not monotone in Q at n={n}: {seq}")

    q = primorial(gal_y)
    drifts = [abs(singular.gallagher_ratio(h, 2, q) - 1) for h in gal_h]
    checks += 1
    if any(b >= a for a, b in zip(drifts, drifts[1:])):
        fails.append(f"gallagher drift not decreasing: {drifts}")
    return checks, fails


def _fraction_spacing(level: str) -> tuple[int, list[str]]:
    qs = (1, 2, 4, 8, 16, 32, 64) if level == "full" else (1, 2, 4, 8, 16)
    checks = 0
    fails: list[str] = []
    for q_lo in qs:
        nums, dens = [], []
        for r in range(q_lo, 2 * q_lo + 1):
            for b in range(r):
                if math.gcd(b, r) == 1:
                    nums.append(b)
                    dens.append(r)
        b_arr = np.asarray(nums, dtype=np.int64)
        r_arr = np.asarray(dens, dtype=np.int64)
        # cross difference numerators b_i r_j - b_j r_i over all pairs; any zero
        # off the diagonal would be a duplicate, and |diff| >= 1/(r_i r_j)
        # >= 1/(4 Q^2) follows from integrality
        cross = b_arr[:, None] * r_arr[None, :] - b_arr[None, :] * r_arr[:, None]
        np.fill_diagonal(cross, 1)
        checks += 1
        if int(np.count_nonzero(cross == 0)):
            fails.append(f"duplicate reduced fractions in band Q={q_lo}")
        checks += 1
        if int((r_arr[:, None] * r_arr[None, :]).max()) > 4 * q_lo * q_lo:
            fails.append(f"denominator product exceeds 4Q^2 in band Q={q_lo}")
    return checks, fails


_SUITES: dict[str, Callable[[str], tuple[int, list[str]]]] = {
    "relgcd-laws": _relgcd_laws,
    "counting-oracle": _counting_oracle,
    "singleton-forcing": _singleton_forcing,
    "mv-identity": _mv_identity,
    "dual-v": _dual_v,
    "r-sum-bound": _r_sum_bound,
    "smooth-rough": _smooth_rough,
    "singular-identities": _singular_identities,
    "partition-identities": _partition_identities,
    "w-weights": _w_weights,
    "scaling": _scaling,
    "fraction-spacing": _fraction_spacing,
}


def suite_names() -> list[str]:
    return list(_SUITES)


def run_suite(name: str, level: str = "quick") -> SuiteResult:
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}; available: {', '.join(_SUITES)}")
    if level not in ("quick", "full"):
        raise ValueError(f"level must be quick or full, got {level!r}")
    t0 = time.perf_counter()
    checks, fails = _SUITES[name](level)
    return SuiteResult(name, checks, fails, time.perf_counter() - t0)


def run_all(level: str = "quick", names: Iterable[str] | None = None,
            echo: Callable[[str], None] | None = print) -> list[SuiteResult]:
    out = []
    for name in names if names is not None else _SUITES:
        res = run_suite(name, level)
        if echo:
            echo(res.line())
        out.append(res)
    return out
