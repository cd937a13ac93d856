"""Command line interface: ``evokit analyze|canon|iso|gen|dibaric|spectrum``.

Basis indices in all output are 1-based. Exit codes: 0 success, 2 parse
error, 3 semantic error; ``iso`` exits 0 (isomorphic) or 1 (not), and 10/11
for parse/semantic errors.
"""
from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import __version__
from .canonical import NotMaximalIndexError, canonicalize, isomorphic_max_index
from .core import DimensionMismatchError
from .dibaric import DibaricityVerdict, NotRealError, decide_dibaricity
from .documents import DocumentError, algebra_to_dict, dump, flow, format_scalar, load_algebra
from .families import KINDS, FamilyParamError, FamilySpec, expected_index, generate
from .powers import (
    NotNilpotentPresentationError,
    derived_powers,
    inclusion_violations,
    max_nilpotent_index,
    nil_check,
    plateau_violations,
    principal_powers,
    right_powers,
    stabilization_violations,
)
from .scalars import BackendMismatchError, ScalarParseError, complex_float
from .spectrum import spectrum

SEMANTIC = (
    BackendMismatchError,
    DimensionMismatchError,
    NotRealError,
    NotMaximalIndexError,
    NotNilpotentPresentationError,
    FamilyParamError,
    ValueError,
)


class UsageError(Exception):
    pass


def _one_based(seq):
    return None if seq is None else flow(i + 1 for i in seq)


def _load(path: str, eps: float | None):
    alg = load_algebra(path, eps)
    if eps is not None and not alg.field.exact:
        alg = alg.converted(complex_float(eps))
    return alg


def _chain_dict(rep) -> dict:
    d = {
        "index": rep.index,
        "stabilized_at": rep.stabilized_at,
        "dims": flow(rep.dims),
    }
    if rep.tolerance_dependent:
        d["tolerance_dependent"] = True
    return d


def _verdict_dict(v: DibaricityVerdict) -> dict:
    d = {"decision": v.decision, "rule": v.rule}
    if v.rules_fired:
        d["rules_fired"] = flow(v.rules_fired)
    if v.witness is not None:
        d["witness"] = {
            "f": flow(_num(x) for x in v.witness.f),
            "g": flow(_num(x) for x in v.witness.g),
        }
    if v.decision == "undecided" and v.rule == "numeric_search":
        d["note"] = "undecided (no witness found)"
    d["tolerance_dependent"] = v.tolerance_dependent
    return d


def _num(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return float(x)


# ---------------------------------------------------------------- verbs

def cmd_analyze(args) -> int:
    eps = args.eps
    t0 = time.perf_counter()
    alg = _load(args.path, eps)
    timings = {"parse": time.perf_counter() - t0}
    kinds = [k.strip() for k in args.chains.split(",") if k.strip()]
    bad = set(kinds) - {"principal", "right", "derived"}
    if bad:
        raise UsageError(f"unknown chain kind(s): {', '.join(sorted(bad))}")
    report: dict = {"input": algebra_to_dict(alg)}

    t = time.perf_counter()
    nv = nil_check(alg)
    report["nil"] = {
        "is_nil": nv.is_nil,
        "witness_cycle": _one_based(nv.witness_cycle),
        "triangularizing_permutation": _one_based(nv.triangularizing_permutation),
    }
    timings["nil"] = time.perf_counter() - t

    chains = {}
    t = time.perf_counter()
    P = principal_powers(alg)
    chains["principal"] = P
    R = right_powers(alg) if "right" in kinds else None
    D = derived_powers(alg) if "derived" in kinds else None
    if R is not None:
        chains["right"] = R
    if D is not None:
        chains["derived"] = D
    timings["chains"] = time.perf_counter() - t
    report["chains"] = {k: _chain_dict(v) for k, v in chains.items()}
    n = alg.dim
    report["nilpotent_index"] = P.index
    if R is not None:
        report["right_nilpotency_index"] = R.index
    if D is not None:
        report["solvability_index"] = D.index
    report["max_nilpotent_index"] = max_nilpotent_index(n)
    report["max_index"] = P.index == max_nilpotent_index(n)
    report["laws"] = {
        "plateau_violations": flow(flow(p) for p in plateau_violations(P)),
        "stabilization_violations": flow(flow(p) for p in stabilization_violations(P)),
        "inclusion_violations": flow(inclusion_violations(P, R, D)),
        "nil_matches_chain": nv.is_nil == (P.index is not None),
    }

    t = time.perf_counter()
    if alg.is_real():
        v = decide_dibaricity(alg, attempts=args.attempts, eps=eps, seed=args.seed)
        report["dibaric"] = _verdict_dict(v)
    else:
        report["dibaric"] = {"decision": "skipped", "note": "dibaricity is defined for real algebras"}
    timings["dibaric"] = time.perf_counter() - t

    if args.oracle:
        from . import oracle

        t = time.perf_counter()
        o: dict = {}
        if n <= 8:
            o["nil_check"] = oracle.naive_nil_check(alg)
            o["nil_check_agrees"] = o["nil_check"] == nv.is_nil
        if alg.field.exact and n <= 5:
            top = min(17, P.last_exponent)
            o["chain_exponents_checked"] = top
            o["chain_agrees"] = all(oracle.naive_principal_power(alg, k) == P.at(k) for k in range(1, top + 1))
            o["nil_elements"] = oracle.naive_nil_element_check(alg, samples=50)
        report["oracle"] = o
        timings["oracle"] = time.perf_counter() - t
    report["timings"] = {k: round(v, 6) for k, v in timings.items()}
    sys.stdout.write(dump(report))
    return 0


def _canon_dict(c) -> dict:
    F = c.field
    d = {
        "dim": c.dim,
        "field": F.name,
        "matrix": [flow(format_scalar(F, a) for a in row) for row in c.matrix],
        "normalized_entry": None if c.normalized_entry is None else flow(i + 1 for i in c.normalized_entry),
        "residuals": [
            {"position": flow((i + 1, j + 1)), "value": format_scalar(F, v)} for (i, j), v in c.residual_entries
        ],
        "ambiguous": c.ambiguous,
        "orbit": [flow(format_scalar(F, v) for v in o) for o in c.orbit],
        "basis": [flow(format_scalar(F, a) for a in row) for row in c.basis],
        "transform": [flow(format_scalar(F, a) for a in row) for row in c.transform],
    }
    return d


def cmd_canon(args) -> int:
    alg = _load(args.path, args.eps)
    c = canonicalize(alg)
    sys.stdout.write(dump(_canon_dict(c)))
    return 0


def cmd_iso(args) -> int:
    try:
        a = _load(args.path_a, args.eps)
        b = _load(args.path_b, args.eps)
    except (DocumentError, OSError) as exc:
        print(f"evokit: parse error: {exc}", file=sys.stderr)
        return 10
    try:
        same = isomorphic_max_index(a, b)
    except SEMANTIC as exc:
        print(f"evokit: error: {exc}", file=sys.stderr)
        return 11
    print("isomorphic" if same else "not isomorphic")
    return 0 if same else 1


def _param_value(key: str, text: str):
    if key in ("gaps", "superdiagonal", "values"):
        return [_param_value("", t) for t in text.split(",") if t.strip()]
    if key in ("variant",):
        return text
    if key == "allow_zero":
        return text.lower() in ("1", "true", "yes")
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return Fraction(text)
    except ValueError:
        return text


def cmd_gen(args) -> int:
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = _param_value(k.strip(), v.strip())
    spec = FamilySpec(args.family, args.n, params)
    alg = generate(spec)
    text = dump(algebra_to_dict(alg))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        exp = expected_index(spec)
        print(f"wrote {args.out}" + (f" (expected nilpotent index {exp})" if exp is not None else ""))
    else:
        sys.stdout.write(text)
    return 0


def cmd_dibaric(args) -> int:
    alg = _load(args.path, args.eps)
    v = decide_dibaricity(alg, attempts=args.attempts, eps=args.eps, seed=args.seed, workers=args.workers)
    sys.stdout.write(dump({"input": algebra_to_dict(alg), "dibaric": _verdict_dict(v)}))
    return 0


def cmd_spectrum(args) -> int:
    try:
        grid = [Fraction(t.strip()) for t in args.grid.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ScalarParseError(args.grid, str(exc)) from exc
    t = time.perf_counter()
    r = spectrum(args.n, grid, budget=args.budget, parallel=args.parallel, seed=args.seed)
    out = {
        "n": r.n,
        "grid": flow(_num(x) for x in r.grid),
        "exhaustive": r.exhaustive,
        "examined": r.examined,
        "indices": flow("none" if k is None else k for k in r.indices),
        "counts": {("none" if k is None else k): v for k, v in r.counts.items()},
        "witnesses": {
            ("none" if k is None else k): {"item": item, "matrix": [flow(_num(x) for x in row) for row in m]}
            for k, (item, m) in r.witnesses.items()
        },
        "laws": {
            "plateau_violations": r.plateau_violations,
            "stabilization_violations": r.stabilization_violations,
        },
        "timings": {"total": round(time.perf_counter() - t, 6)},
    }
    sys.stdout.write(dump(out))
    return 0


# ---------------------------------------------------------------- entry point

def _eps(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("eps must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="evokit", description="Evolution algebra toolkit.")
    p.add_argument("--version", action="version", version=f"evokit {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    a = sub.add_parser("analyze", help="chains, indices, nil and dibaric verdicts")
    a.add_argument("path")
    a.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracles")
    a.add_argument("--eps", type=_eps, default=None, help="float tolerance (default: $EVOKIT_EPS or 1e-9)")
    a.add_argument("--chains", default="principal,right,derived")
    a.add_argument("--attempts", type=int, default=200)
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("canon", help="normal form of a maximal-index algebra")
    c.add_argument("path")
    c.add_argument("--eps", type=_eps, default=None)
    c.set_defaults(func=cmd_canon)

    i = sub.add_parser("iso", help="isomorphism test for maximal-index algebras (exit 0/1)")
    i.add_argument("path_a")
    i.add_argument("path_b")
    i.add_argument("--eps", type=_eps, default=None)
    i.set_defaults(func=cmd_iso)

    g = sub.add_parser("gen", help="write a family member as an algebra document")
    g.add_argument("--family", required=True, choices=KINDS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--param", action="append", metavar="KEY=VALUE")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("dibaric", help="dibaricity verdict")
    d.add_argument("path")
    d.add_argument("--eps", type=_eps, default=None)
    d.add_argument("--attempts", type=int, default=200)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--workers", type=int, default=1)
    d.set_defaults(func=cmd_dibaric)

    s = sub.add_parser("spectrum", help="observed nilpotent indices over a grid")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--grid", required=True, help="comma-separated rationals, e.g. 0,1,-1,2")
    s.add_argument("--budget", type=int, default=None)
    s.add_argument("--parallel", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_spectrum)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DocumentError, ScalarParseError) as exc:
        print(f"evokit: parse error: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"evokit: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"evokit: error: {exc}", file=sys.stderr)
        return 2
    except SEMANTIC as exc:
        print(f"evokit: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
