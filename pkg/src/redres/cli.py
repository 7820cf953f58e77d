"""Command-line interface.

Subcommands mirror the library modules: relgcd decompositions, solution
counting over boxes / intervals, moment and variance routes with their exact
identity checks, singular-series evaluation, distinct-tuple sums and their
main-term tables, set-partition machinery, config-driven experiments, and
the invariant verification suites.

Exit status: 0 on success, 1 when a requested check or verification fails,
2 for bad usage, a malformed config, or a cap violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import experiments, fracsolve, moments, partitions, relgcd, singular, verify
from .arith import PrecisionBreach, primorial, totient
from .experiments import ConfigError


def _fmt(v: object) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _workers(args: argparse.Namespace) -> int:
    if getattr(args, "workers", None) is not None:
        return args.workers
    return int(os.environ.get("REDRES_WORKERS", "1"))


def _parse_target(text: str) -> int | None:
    if text == "any":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"target must be 'any' or an integer, got {text!r}"
        ) from None


def _parse_d_tuple(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None


def _cmd_relgcd(args: argparse.Namespace) -> int:
    q = tuple(args.q)
    d = relgcd.decompose_local(q)
    agree = d == relgcd.decompose_recursive(q)
    print(f"q = ({', '.join(map(str, q))})")
    for mask, g in d.entries:
        idx = relgcd.mask_to_indices(mask)
        print(f"  g{{{','.join(map(str, idx))}}} = {g}")
    ok, witness = relgcd.check_cross_coprimality(d)
    roundtrip = d.recompose() == q
    print(f"recompose matches: {roundtrip}")
    print(f"cross-coprimality holds: {ok}" + (f" (witness {witness})" if witness else ""))
    print(f"local and recursive agree: {agree}")
    return 0 if (agree and ok and roundtrip) else 1


def _print_report(rep: fracsolve.CountReport) -> None:
    print(f"count = {rep.total}")
    if rep.degenerate is not None:
        print(f"degenerate = {rep.degenerate}")
        print(f"non_degenerate = {rep.non_degenerate}")
    print(f"method = {rep.method}")
    print(f"elapsed_s = {rep.elapsed_seconds:.3f}")


def _cmd_count(args: argparse.Namespace) -> int:
    c = fracsolve.BoxConstraint(args.k, args.n, args.q_max, args.target)
    tgt = "any" if args.target is None else args.target
    print(f"box: k={args.k} n={args.n} Q={args.q_max} target={tgt}")
    if args.classify:
        rep = fracsolve.classify_degenerate(c, workers=_workers(args))
    else:
        rep = fracsolve.count_box(c, method=args.method, workers=_workers(args))
    _print_report(rep)
    return 0


def _load_interval_spec(path: str) -> fracsolve.IntervalConstraint:
    """Spec file: one `key = value` per line with target plus A1/Q1 .. Ak/Qk,
    where Ai is a two-element list of rational endpoints and Qi an integer."""
    target: int | None = None
    a: dict[int, tuple[Fraction, Fraction]] = {}
    caps: dict[int, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path} line {lineno}: expected key = value")
        key, _, rest = line.partition("=")
        key = key.strip()
        value = experiments._parse_value(rest, lineno)
        if key == "target":
            if value == "any":
                target = None
            elif isinstance(value, int):
                target = value
            else:
                raise ConfigError(f"{path} line {lineno}: target must be any or an integer")
        elif key.startswith("A") and key[1:].isdigit():
            if not (isinstance(value, list) and len(value) == 2):
                raise ConfigError(f"{path} line {lineno}: {key} needs [lo, hi]")
            lo, hi = (Fraction(v) for v in value)
            a[int(key[1:])] = (lo, hi)
        elif key.startswith("Q") and key[1:].isdigit():
            if not isinstance(value, int):
                raise ConfigError(f"{path} line {lineno}: {key} must be an integer")
            caps[int(key[1:])] = value
        else:
            raise ConfigError(f"{path} line {lineno}: unknown key {key!r}")
    k = len(a)
    if sorted(a) != list(range(1, k + 1)) or sorted(caps) != list(range(1, k + 1)):
        raise ConfigError(f"{path}: need contiguous A1..Ak and Q1..Qk entries")
    return fracsolve.IntervalConstraint(
        tuple(a[i] for i in range(1, k + 1)),
        tuple(caps[i] for i in range(1, k + 1)),
        target,
    )


def _cmd_count_interval(args: argparse.Namespace) -> int:
    c = _load_interval_spec(args.spec)
    tgt = "any" if c.target is None else c.target
    ivals = " ".join(f"[{_fmt(lo)},{_fmt(hi)}]/{cap}"
                     for (lo, hi), cap in zip(c.intervals, c.q_caps))
    print(f"intervals: {ivals} target={tgt}")
    rep = fracsolve.count_interval(c, method=args.method, workers=_workers(args))
    _print_report(rep)
    return 0


def _cmd_moments(args: argparse.Namespace) -> int:
    q, h = args.q, args.h
    w = _workers(args)
    if args.mixed is not None:
        k1, k2 = args.mixed
        m = moments.M_mixed_direct(q, h, k1, k2, workers=w)
        v = moments.V_mixed_expsum(q, h, k1, k2)
        resid = moments.check_mixed_MV_identity(q, h, k1, k2)
        print(f"M_{{{k1},{k2}}}({q},{h}) = {_fmt(m)} = {float(m)!r}")
        print(f"V_{{{k1},{k2}}}({q},{h}) = {v!r}")
        print(f"identity residual = {resid!r}")
        return 0 if resid <= 1e-9 * (1 + abs(float(m))) else 1
    k = args.k
    if args.check == "identity":
        resid = moments.check_MV_identity(q, h, k, workers=w)
        print(f"identity residual = {_fmt(resid)}")
        return 0 if resid == 0 else 1
    if args.check == "rough":
        if args.q2 is None:
            raise ConfigError("--check rough needs --q2")
        resid = moments.check_smooth_rough_decomposition(q, args.q2, h, k)
        print(f"decomposition residual = {_fmt(resid)}")
        return 0 if resid == 0 else 1
    if args.check == "rsum":
        lhs, rhs, holds = moments.check_r_sum_bound(q, k)
        print(f"lhs = {_fmt(lhs)}")
        print(f"rhs = {_fmt(rhs)}")
        print(f"bound holds: {holds}")
        return 0 if holds else 1
    m = moments.M_direct(q, h, k, workers=w)
    v_exact = moments.V_via_singular(q, h, k, workers=w)
    v_float = moments.V_expsum(q, h, k) if k >= 1 else float(v_exact)
    resid = moments.check_MV_identity(q, h, k, workers=w)
    print(f"M_{k}({q},{h}) = {_fmt(m)} = {float(m)!r}")
    print(f"V_{k}({q},{h}) = {_fmt(v_exact)} (exponential-sum route {v_float!r})")
    print(f"identity residual = {_fmt(resid)}")
    return 0 if resid == 0 else 1


def _cmd_singular(args: argparse.Namespace) -> int:
    d = args.d
    if args.q is not None:
        if args.refined:
            print(f"S0({','.join(map(str, d))}; {args.q}) = {_fmt(singular.S0_mod_q(d, args.q))}")
        else:
            print(f"S({','.join(map(str, d))}; {args.q}) = {_fmt(singular.S_mod_q(d, args.q))}")
    if args.infinite:
        value, bound = singular.S_infinite(d, args.P)
        print(f"S_inf({','.join(map(str, d))}) ~ {value!r} (primes <= {args.P}, tail bound {bound:.3e})")
    if args.q is None and not args.infinite:
        raise ConfigError("nothing to compute: pass --q and/or --infinite")
    return 0


def _cmd_rk(args: argparse.Namespace) -> int:
    q = primorial(args.y) if args.q is None else args.q
    r = singular.R_mod_q(args.h, args.k, q, workers=_workers(args))
    ref = float(args.h) ** ((args.k - 1) / 2)
    print(f"q = {q}")
    print(f"R_{args.k}({args.h}) = {_fmt(r)} = {float(r)!r}")
    print(f"reference h^((k-1)/2) = {ref!r}")
    print(f"ratio = {float(r) / ref!r}")
    if args.gallagher:
        g = singular.gallagher_ratio(args.h, args.k, q, workers=_workers(args))
        print(f"gallagher ratio = {g!r} (drift {abs(g - 1)!r})")
    return 0


def _cmd_rk_terms(args: argparse.Namespace) -> int:
    q = primorial(args.y) if args.q is None else args.q
    table = partitions.main_term_table(args.h, q, args.k, workers=_workers(args))
    print(f"q = {q}, h = {args.h}, k = {args.k}")
    for row in table.rows:
        print(f"  {row.label:28s} {_fmt(row.value)} = {float(row.value)!r}")
    print(f"total      = {_fmt(table.total)} = {float(table.total)!r}")
    print(f"exact R    = {_fmt(table.r_exact)} = {float(table.r_exact)!r}")
    gap = table.r_exact - table.total
    print(f"difference = {_fmt(gap)} = {float(gap)!r}")
    return 0


def _cmd_partitions(args: argparse.Namespace) -> int:
    k = args.k
    if args.check == "lemma":
        if args.h is None or args.q is None:
            raise ConfigError("--check lemma needs --h and --q")
        bad = 0
        parts = partitions.enumerate_partitions(k)
        for p in parts:
            resid = partitions.check_partition_lemma(p, args.h, args.q)
            if resid != 0:
                bad += 1
                print(f"residual {_fmt(resid)} at blocks {p.blocks}")
        print(f"partitions checked = {len(parts)}, nonzero residuals = {bad}")
        return 0 if bad == 0 else 1
    if args.check == "identity":
        if args.h is None or args.q is None:
            raise ConfigError("--check identity needs --h and --q")
        resid = partitions.check_Rk_partition_identity(args.h, k, args.q)
        print(f"identity residual = {_fmt(resid)}")
        return 0 if resid == 0 else 1
    parts = partitions.enumerate_partitions(k)
    for p in parts:
        blocks = " ".join("{" + ",".join(map(str, b)) + "}" for b in p.blocks)
        print(f"w = {partitions.w_weight(p):4d}  {blocks}")
    print(f"partitions = {len(parts)}")
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    cfg = experiments.parse_config_file(args.config)
    rows = experiments.run_experiment(cfg)
    text = experiments.render_rows(cfg, rows)
    failed = sum(1 for row in rows if row.get("error"))
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {len(rows)} rows to {cfg.out}")
    else:
        sys.stdout.write(text)
    if failed:
        print(f"warning: {failed} rows carry an error column", file=sys.stderr)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.list:
        for name in verify.suite_names():
            print(name)
        return 0
    names = args.suite if args.suite else None
    results = verify.run_all(args.level, names)
    return 0 if all(r.ok for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="redres",
        description="Exact tools for reduced residues, relative gcd "
        "decompositions, and unit-fraction solution counts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("relgcd", help="decompose a tuple of moduli into subset factors")
    p.add_argument("q", type=int, nargs="+", help="positive integers")
    p.set_defaults(func=_cmd_relgcd)

    p = sub.add_parser("count", help="count solutions over a box alphabet")
    p.add_argument("--k", type=int, required=True, help="arity (odd)")
    p.add_argument("--n", type=int, required=True, help="numerator bound")
    p.add_argument("--Q", dest="q_max", type=int, required=True, help="denominator bound")
    p.add_argument("--target", type=_parse_target, default=None,
                   help="'any' (default) or an integer")
    p.add_argument("--method", choices=("auto", "naive", "mitm"), default="auto")
    p.add_argument("--classify", action="store_true",
                   help="split the zero-target count into degenerate and not")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("count-interval", help="count solutions over interval alphabets")
    p.add_argument("--spec", required=True, help="spec file with target, A1..Ak, Q1..Qk")
    p.add_argument("--method", choices=("auto", "naive", "mitm"), default="auto")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_count_interval)

    p = sub.add_parser("moments", help="moments of reduced-residue counts in windows")
    p.add_argument("--q", type=int, required=True, help="squarefree modulus")
    p.add_argument("--h", type=int, required=True, help="window length")
    p.add_argument("--k", type=int, default=2, help="moment order")
    p.add_argument("--mixed", type=_parse_d_tuple, default=None, metavar="K1,K2",
                   help="mixed moment orders")
    p.add_argument("--check", choices=("identity", "rough", "rsum"), default=None)
    p.add_argument("--q2", type=int, default=None, help="rough part for --check rough")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("singular", help="singular series values")
    p.add_argument("--d", type=_parse_d_tuple, required=True, metavar="D1,D2,...")
    p.add_argument("--q", type=int, default=None, help="squarefree modulus")
    p.add_argument("--refined", action="store_true", help="refined series over q")
    p.add_argument("--infinite", action="store_true", help="truncated product over all primes")
    p.add_argument("--P", type=int, default=10**5, help="prime cutoff for --infinite")
    p.set_defaults(func=_cmd_singular)

    p = sub.add_parser("rk", help="distinct-tuple singular-series sum")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--y", type=int, help="use the primorial of y as modulus")
    group.add_argument("--q", type=int, help="explicit squarefree modulus")
    p.add_argument("--gallagher", action="store_true", help="also print the normalized ratio")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_rk)

    p = sub.add_parser("rk-terms", help="main-term table for k = 3 or 5")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--k", type=int, choices=(3, 5), required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--y", type=int, help="use the primorial of y as modulus")
    group.add_argument("--q", type=int, help="explicit squarefree modulus")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_rk_terms)

    p = sub.add_parser("partitions", help="set partitions, weights, and identity checks")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--check", choices=("lemma", "identity"), default=None)
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.set_defaults(func=_cmd_partitions)

    p = sub.add_parser("experiment", help="run a config-driven experiment")
    esub = p.add_subparsers(dest="action", required=True)
    pr = esub.add_parser("run", help="run a config file")
    pr.add_argument("config", help="path to the config file")
    pr.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--suite", action="append", default=None,
                   help="run only this suite (repeatable)")
    p.add_argument("--list", action="store_true", help="list suite names and exit")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PrecisionBreach as exc:
        print(f"precision check failed: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
