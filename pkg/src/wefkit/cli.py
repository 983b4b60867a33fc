"""wefkit command line.

Exit codes: 0 success, 1 a checked property failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .lp.rational import fmt_rat, parse_rat

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _d(text: str, upper_open: bool = False) -> Fraction:
    if "." in text or "e" in text.lower():
        raise argparse.ArgumentTypeError(f"d must be exact, like 1/2 (got {text!r})")
    try:
        d = parse_rat(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}: {e}") from None
    if not (0 < d < Fraction(1, 2) if upper_open else 0 < d <= Fraction(1, 2)):
        raise argparse.ArgumentTypeError(f"d = {text} out of range")
    return d


def _d_open(text):
    return _d(text, upper_open=True)


def _bits(text: str) -> tuple:
    text = text.strip().replace(",", "").replace(" ", "")
    if set(text) - {"0", "1"}:
        raise UsageError(f"not a bitstring: {text!r}")
    return tuple(int(c) for c in text)


def _source_kind(path: Path) -> str:
    if path.suffix in (".psc", ".pseudo"):
        return "psc"
    if path.suffix in (".circuit", ".circ"):
        return "circuit"
    raise UsageError(f"{path}: unknown source type (use .psc or .circuit)")


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load_wef(path):
    from .wef import WEFSystem

    try:
        return WEFSystem.loads(_read(path))
    except (ValueError, KeyError) as e:
        raise UsageError(f"{path}: not a compiled WEF dump ({e})") from None


# ----------------------------------------------------------------- compile
def _table(wef) -> str:
    names = wef.lp.names
    out = []
    for k, c in enumerate(wef.lp.constraints):
        lhs = " ".join(f"{'+' if a > 0 else '-'} {fmt_rat(abs(a))} {names[j]}" for j, a in c.terms)
        out.append(f"{k + 1:>6} {c.tag:<7} {lhs} {c.sense} {fmt_rat(c.rhs)}")
    return "\n".join(out) + "\n"


def cmd_compile(args) -> int:
    from .circuit import encode, parse_circuit
    from .compiler import CompileParams, compile_program, stats_check
    from .pseudolang import load

    src = Path(args.source)
    kind = _source_kind(src)
    text = _read(src)
    ok = True
    if kind == "psc":
        prog = load(text, args.word_size)
        W = prog.symbols.W
        p = args.steps if args.steps is not None else prog.l + 1
        params = CompileParams(W, p)
        wef = compile_program(prog, params)
        print(f"program: {src.name}  lines {prog.l}  memory bits {prog.symbols.q}  W={W}  p={p}")
        rep = stats_check(wef, params, prog)
        for line in rep.lines():
            print("  " + line)
    else:
        circ = parse_circuit(text)
        wef = encode(circ)
        t = circ.t
        m, n = wef.lp.num_constraints, wef.lp.num_vars
        ok = m == 4 * t and n == circ.q + t
        print(f"circuit: {src.name}  inputs {circ.q}  gates {t}")
        print(f"  inequalities {m} (4t = {4 * t})  variables {n} (q+t = {circ.q + t})"
              f"  {'ok' if ok else 'MISMATCH'}")
    fmt = args.format
    out = Path(args.output) if args.output else src.with_suffix({"dump": ".wef", "lp": ".lp",
                                                                 "table": ".txt"}[fmt])
    if fmt == "dump":
        body = wef.dumps()
    elif fmt == "lp":
        body = wef.to_lp()
    else:
        body = _table(wef)
    out.write_text(body)
    print(f"wrote {out}")
    return OK if ok else FAILED


# ------------------------------------------------------------------ decide
def cmd_decide(args) -> int:
    from .driver import decide

    wef = _load_wef(args.wef)
    x = _bits(args.bits)
    if len(x) != wef.q:
        raise UsageError(f"bitstring has {len(x)} bits, the WEF has {wef.q} inputs")
    v = decide(wef, x, args.d, certify=args.certify)
    for line in v.lines():
        print(line)
    print(f"iterations: {v.iterations}")
    return OK


# ------------------------------------------------------------------ verify
def _oracle(source: str, q: int, steps):
    """Callable input -> bit for a .psc program, a circuit file, or 'matching'."""
    if source == "matching":
        from .matching import edges, has_pm

        n = next((n for n in range(2, 12, 2) if len(edges(n)) == q), None)
        if n is None:
            raise UsageError(f"{q} inputs is not an edge count C(n,2)")
        return lambda x: has_pm(n, x)
    path = Path(source)
    kind = _source_kind(path)
    if kind == "circuit":
        from .circuit import evaluate, parse_circuit

        circ = parse_circuit(_read(path))
        return lambda x: evaluate(circ, x)[0]
    from .pseudolang import interpret, load

    prog = load(_read(path))
    budget = steps or 100_000
    return lambda x: interpret(prog, x, budget).w


class _Picklable:
    """Oracle wrapper that rebuilds itself in worker processes."""

    def __init__(self, source, q, steps):
        self.args = (source, q, steps)
        self.fn = None

    def __call__(self, x):
        if self.fn is None:
            self.fn = _oracle(*self.args)
        return self.fn(x)

    def __getstate__(self):
        return {"args": self.args, "fn": None}


def cmd_verify(args) -> int:
    from .driver import verify_x01

    wef = _load_wef(args.wef)
    if wef.q > 20:
        raise UsageError(f"{wef.q} inputs: exhaustive verification is limited to 20")
    oracle = _Picklable(args.oracle, wef.q, args.steps)
    oracle((0,) * wef.q)  # surface oracle errors before fanning out
    rep = verify_x01(wef, oracle, workers=args.workers)
    lines = rep.table()
    if not args.full:
        lines = [lines[0]] + [ln for ln in lines[1:-1] if "FAIL" in ln] + [lines[-1]]
    print("\n".join(lines))
    return OK if rep.ok else FAILED


# -------------------------------------------------------------------- lab
def _print_reports(reports) -> int:
    for r in reports:
        print(r)
    passed = sum(r.ok for r in reports)
    print(f"{passed}/{len(reports)} reports pass")
    return OK if passed == len(reports) else FAILED


def cmd_lab_matching(args) -> int:
    from . import matching

    n = args.n
    if n not in (2, 4, 6):
        raise UsageError("--n must be 2, 4 or 6")
    checks = {
        "ep": lambda: [matching.check_ep_face(n)],
        "objective": lambda: matching.random_objectives(n, args.samples, args.seed),
        "odd": lambda: [matching.check_odd_set(n)],
        "facets": lambda: [matching.check_facets(n)] if n > 2 else [],
        "cross": lambda: [matching.check_cross_oracle()] if n == 4 else [],
    }
    if args.graph is not None:
        x = matching.graph(n, args.graph.split(",")) if args.graph else (0,) * len(matching.edges(n))
        return _print_reports([matching.check_objective(n, x, args.d)])
    chosen = list(checks) if args.check == "all" else [args.check]
    reps = [r for c in chosen for r in checks[c]()]
    return _print_reports(reps)


def cmd_lab_sandwich(args) -> int:
    import random

    from . import sandwich as sw

    n, d = args.n, args.d
    if not 1 <= n <= 8:
        raise UsageError("--n must be between 1 and 8")
    if args.random:
        L = sw.Language.random(n, random.Random(args.seed))
    else:
        words = [w for item in (args.lang or []) for w in item.split(",") if w]
        L = sw.Language.of(n, words)
    reps = [sw.check_slack(L, d)]
    if args.decide:
        for name, P in (("conv(V)", sw.hull_system(L)), ("H", sw.outer_system(L, d))):
            r = sw.check_decisions(P, L, d)
            r.title += f" with P = {name}"
            reps.append(r)
    if args.factor:
        rows, verts = sw.outer_rows(L, d), sw.inner_vertices(L)
        S = sw.slack(rows, verts)
        found = sw.search_factorization(S)
        print(f"exact rank of the slack: {sw.rank(S)}")
        if found is None:
            print("no column-support factorization below full width; using T = I, U = S")
            T, U = sw.identity_factorization(S)
        else:
            T, U = found
            print(f"column-support factorization with inner dimension {len(T[0])}")
        ext = sw.extension_from_factorization(rows, verts, T, U)
        reps.append(ext.report)
    if args.csv:
        Path(args.csv).write_text(sw.M_csv(L, d))
        print(f"wrote {args.csv}")
    return _print_reports(reps)


# ---------------------------------------------------------------- optimize
def cmd_optimize(args) -> int:
    from .driver import (WeightedMatchingFamily, call_bound, max_weight_matching,
                         optimize_binary_search)

    fam = WeightedMatchingFamily(args.n, args.word_size)
    try:
        weights = [int(w) for w in args.weights.split(",")]
    except ValueError:
        raise UsageError("--weights takes comma-separated integers") from None
    if len(weights) != len(fam.edges):
        raise UsageError(f"K_{args.n} has {len(fam.edges)} edges, got {len(weights)} weights")
    if any(not 0 <= w < 2 ** args.word_size for w in weights):
        raise UsageError(f"weights must fit in {args.word_size} bits")
    res = optimize_binary_search(fam, weights, (0, fam.max_total))
    bound = call_bound(0, fam.max_total)
    print(f"circuit: {len(fam.circuit.gates)} gates, {fam.wef.lp.num_constraints} inequalities")
    for k, ans in res.probes:
        print(f"  k = {k:>3}: {'yes' if ans else 'no'}")
    print(f"maximum weight: {res.best}  decide calls: {res.calls} (bound {bound})")
    if args.check:
        brute = max_weight_matching(args.n, weights)
        print(f"brute force: {brute}")
        return OK if brute == res.best and res.calls <= bound else FAILED
    return OK


# ------------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wefkit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"wefkit {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    c = sub.add_parser("compile", help="compile a .psc program or a .circuit file")
    c.add_argument("source")
    c.add_argument("--steps", "-p", type=int, help="time steps p (default: lines + 1)")
    c.add_argument("--word-size", "-W", type=int, help="word size W (must agree with a word declaration)")
    c.add_argument("--format", choices=("dump", "lp", "table"), default="dump")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compile)

    d = sub.add_parser("decide", help="decide one input by exact optimization")
    d.add_argument("wef", help="dump written by compile")
    d.add_argument("bits")
    d.add_argument("--d", type=_d, default=Fraction(1, 2), help="exact rational in (0, 1/2]")
    d.add_argument("--certify", action="store_true", help="range every variable on the optimal face")
    d.set_defaults(func=cmd_decide)

    v = sub.add_parser("verify", help="exhaustive x-0/1 check against an oracle")
    v.add_argument("wef")
    v.add_argument("--oracle", required=True, help=".psc program, .circuit file or 'matching'")
    v.add_argument("--steps", type=int, help="interpreter step budget")
    v.add_argument("--workers", "-j", type=int, default=1)
    v.add_argument("--full", action="store_true", help="print every row, not only failures")
    v.set_defaults(func=cmd_verify)

    lab = sub.add_parser("lab", help="matching-polytope and sandwich laboratories")
    lsub = lab.add_subparsers(dest="lab", metavar="LAB")
    lsub.required = True
    m = lsub.add_parser("matching")
    m.add_argument("--n", type=int, default=4)
    m.add_argument("--check", choices=("all", "ep", "objective", "odd", "facets", "cross"), default="all")
    m.add_argument("--graph", help="edges like 12,34 for a single objective check")
    m.add_argument("--d", type=_d, default=Fraction(1, 2))
    m.add_argument("--samples", type=int, default=20)
    m.add_argument("--seed", type=int, default=0)
    m.set_defaults(func=cmd_lab_matching)
    s = lsub.add_parser("sandwich")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--lang", action="append", help="member bitstrings, comma separated")
    s.add_argument("--random", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--d", type=_d_open, default=Fraction(1, 3), help="exact rational in (0, 1/2)")
    s.add_argument("--decide", action="store_true", help="also decide every input over conv(V) and H")
    s.add_argument("--factor", action="store_true", help="build an extension from a factorization")
    s.add_argument("--csv", help="write M as exact-rational CSV")
    s.set_defaults(func=cmd_lab_sandwich)

    o = sub.add_parser("optimize", help="max-weight perfect matching by binary search")
    o.add_argument("--n", type=int, default=4, choices=(2, 4))
    o.add_argument("--word-size", "-W", type=int, default=3)
    o.add_argument("--weights", required=True, help="one weight per edge, lexicographic")
    o.add_argument("--check", action="store_true", help="compare with brute force")
    o.set_defaults(func=cmd_optimize)
    return ap


def main(argv=None) -> int:
    from .circuit import CircuitError
    from .compiler import CompileError, StatsError
    from .lp import LPError
    from .pseudolang import PseudoError

    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.func(args)
    except StatsError as e:
        print(f"wefkit: size bound violated: {e}", file=sys.stderr)
        return FAILED
    except (UsageError, PseudoError, CircuitError, CompileError, LPError) as e:
        print(f"wefkit: error: {e}", file=sys.stderr)
        return USAGE
    except (ValueError, ArithmeticError) as e:
        print(f"wefkit: error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
