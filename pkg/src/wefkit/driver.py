"""Decision by optimization over a WEF, and the checks around it.

With ``m`` the number of ones in ``x_bar`` and ``c_j = +1`` where
``x_bar_j = 1`` and ``-1`` elsewhere, ``c.x <= m`` on the unit cube with
equality only at ``x = x_bar``.  Maximizing ``c.x + d*w`` therefore reaches
``m + d`` exactly when the unique extension of ``x_bar`` has ``w = 1``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log2
from typing import Callable, Optional, Sequence

from .circuit import AND, OR, Circuit, Gate, Literal, const, encode, gate, inp
from .lp import EQ, OPTIMAL, LinConstraint, Objective, fix_vars, solve, var_ranges
from .lp.presolve import propagate
from .lp.rational import fmt_rat
from .lp.system import LPBuilder
from .wef import WEFSystem

HALF = Fraction(1, 2)


class DecisionError(RuntimeError):
    """The WEF misbehaved (infeasible, unbounded): a construction bug."""


class NonMonotoneFamily(ValueError):
    pass


def _bits(x_bar) -> tuple[int, ...]:
    out = tuple(int(b) for b in x_bar)
    if any(b not in (0, 1) for b in out):
        raise ValueError("x_bar must be a 0/1 vector")
    return out


def _check_d(d) -> Fraction:
    d = Fraction(d)
    if not 0 < d <= HALF:
        raise ValueError("d must satisfy 0 < d <= 1/2")
    return d


@dataclass(frozen=True)
class DecisionInstance:
    x_bar: tuple
    d: Fraction = HALF

    def __post_init__(self):
        object.__setattr__(self, "x_bar", _bits(self.x_bar))
        object.__setattr__(self, "d", _check_d(self.d))

    @property
    def m(self) -> int:
        return sum(self.x_bar)


def build_objective(wef: WEFSystem, inst: DecisionInstance) -> Objective:
    """+1/-1 on each x-variable according to x_bar, d on w."""
    if len(inst.x_bar) != wef.q:
        raise ValueError(f"x_bar has {len(inst.x_bar)} bits, the WEF has {wef.q} inputs")
    coeffs = {v: (1 if b else -1) for v, b in zip(wef.x_vars, inst.x_bar)}
    coeffs[wef.w_var] = inst.d
    return Objective.maximize(coeffs)


@dataclass
class Verdict:
    answer: bool
    z_star: Fraction
    m: int
    d: Fraction
    point: tuple = ()
    ranges: Optional[dict] = None  # per-variable (min, max) on the optimal face
    iterations: int = 0

    @property
    def word(self) -> str:
        return "yes" if self.answer else "no"

    @property
    def unique(self) -> Optional[bool]:
        if self.ranges is None:
            return None
        return all(lo == hi for lo, hi in self.ranges.values())

    def lines(self) -> list[str]:
        out = [f"answer: {self.word}", f"z*: {fmt_rat(self.z_star)}",
               f"m: {self.m}", f"d: {fmt_rat(self.d)}",
               f"m + d: {fmt_rat(self.m + self.d)}"]
        if self.ranges is not None:
            out.append(f"unique optimum: {'yes' if self.unique else 'no'}")
        return out


def extension(wef: WEFSystem, x_bar: Sequence[int]) -> Optional[tuple]:
    """The extension of x_bar when bound propagation alone pins every variable."""
    fixed = fix_vars(wef.lp, {v: b for v, b in zip(wef.x_vars, x_bar)})
    pre = propagate(fixed)
    if pre.infeasible or any(not pre.fixed(j) for j in range(fixed.num_vars)):
        return None
    return tuple(pre.lower)


def optimal_face_ranges(wef: WEFSystem, obj: Objective, z_star: Fraction) -> dict:
    face = wef.lp.with_constraints(
        [LinConstraint.make(dict(obj.terms), EQ, z_star - obj.constant, "face")])
    return var_ranges(face)


def decide(wef: WEFSystem, x_bar: Sequence[int], d=HALF, certify: bool = False,
           warm: bool = True) -> Verdict:
    """Solve ``max c.x + d w`` exactly; yes iff ``z* = m + d``.

    ``certify`` additionally ranges every variable over the optimal face.
    ``warm`` starts the simplex from the propagated extension of x_bar when
    there is one; this changes the pivot path only.
    """
    inst = DecisionInstance(x_bar, d)
    obj = build_objective(wef, inst)
    start = extension(wef, inst.x_bar) if warm else None
    res = solve(wef.lp, obj, start=start)
    if res.status != OPTIMAL:
        raise DecisionError(f"WEF optimization ended {res.status}: construction bug")
    v = Verdict(res.z_star == inst.m + inst.d, res.z_star, inst.m, inst.d,
                res.point, None, res.iterations)
    if certify:
        v.ranges = optimal_face_ranges(wef, obj, res.z_star)
    return v


def all_inputs(q: int):
    return itertools.product((0, 1), repeat=q)


# ------------------------------------------------------------------ safe d
@dataclass
class SafeD:
    d: Fraction
    eps: dict          # x_bar -> epsilon at d0 (no-instances)
    rounds: int        # halvings needed after the first candidate

    @property
    def min_eps(self) -> Optional[Fraction]:
        return min(self.eps.values()) if self.eps else None


def pmap(fn, jobs, workers: int = 1) -> list:
    """Order-preserving map, over processes when ``workers > 1``."""
    jobs = list(jobs)
    if workers <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(workers) as ex:
        return list(ex.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def _decide_job(args):
    wef, x, d, certify = args
    return decide(wef, x, d, certify=certify)


def find_safe_d(wef: WEFSystem, inputs=None, d0=HALF, max_rounds: int = 64,
                certify: bool = True, workers: int = 1) -> SafeD:
    """Largest tried d at which every no-instance optimizes to exactly ``m``.

    ``eps(x) = m + d0 - z*(x, d0)`` is measured for each no-instance; ``d0``
    is kept when every eps equals d0, otherwise ``min eps / 2`` is halved
    until all no-instances re-verify with ``z* = m``.  With ``certify`` the
    optimum at the returned d must also be unique and integral.
    """
    d0 = _check_d(d0)
    inputs = [tuple(x) for x in (all_inputs(wef.q) if inputs is None else inputs)]
    first = pmap(_decide_job, [(wef, x, d0, False) for x in inputs], workers)
    eps = {x: v.m + d0 - v.z_star for x, v in zip(inputs, first) if not v.answer}

    def verified(d):
        got = pmap(_decide_job, [(wef, x, d, certify) for x in eps], workers)
        for v in got:
            if v.z_star != v.m:
                return False
            if certify and not (v.unique and all(lo in (0, 1) for lo, _ in v.ranges.values())):
                return False
        return True

    d = d0 if all(e == d0 for e in eps.values()) else min(eps.values()) / 2
    for rounds in range(max_rounds):
        if verified(d):
            return SafeD(d, eps, rounds)
        d /= 2
    raise DecisionError("no safe d found within the halving budget")


# ------------------------------------------------------------ x-0/1 check
@dataclass
class X01Row:
    x: tuple
    ok: bool
    w: Optional[Fraction]
    expected: int
    problem: str = ""


@dataclass
class X01Report:
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(r.ok for r in self.rows)

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not r.ok]

    def table(self) -> list[str]:
        out = [f"{'x':<24} {'w':>3} {'oracle':>6}  result"]
        for r in self.rows:
            bits = "".join(map(str, r.x))
            w = "-" if r.w is None else fmt_rat(r.w)
            out.append(f"{bits:<24} {w:>3} {r.expected:>6}  "
                       + ("pass" if r.ok else "FAIL " + r.problem))
        out.append(f"{self.passed}/{self.total} pass")
        return out


def check_x01(wef: WEFSystem, x: Sequence[int], expected: int) -> X01Row:
    x = _bits(x)
    lp = fix_vars(wef.lp, {v: b for v, b in zip(wef.x_vars, x)})
    try:
        ranges = var_ranges(lp)
    except ValueError:
        return X01Row(x, False, None, expected, "fixed-x system infeasible")
    names = lp.names
    for j, (lo, hi) in ranges.items():
        if lo != hi:
            return X01Row(x, False, None, expected,
                          f"{names[j]} not unique: range [{lo}, {hi}]")
        if lo not in (0, 1):
            return X01Row(x, False, lo, expected, f"{names[j]} = {lo} is fractional")
    w = ranges[wef.w_var][0]
    if w != expected:
        return X01Row(x, False, w, expected, f"w = {w}, oracle says {expected}")
    return X01Row(x, True, w, expected)


def _check_job(args):
    wef, x, expected = args
    return check_x01(wef, x, expected)


def verify_x01(wef: WEFSystem, oracle: Callable[[tuple], int], workers: int = 1,
               inputs=None) -> X01Report:
    """Fix every 0/1 input, require a unique 0/1 extension whose w is oracle(x).

    With ``workers > 1`` the assignments fan out over processes (the oracle
    then has to be picklable); results keep enumeration order either way.
    """
    inputs = [tuple(x) for x in (all_inputs(wef.q) if inputs is None else inputs)]
    jobs = [(wef, x, int(oracle(x))) for x in inputs]
    return X01Report(pmap(_check_job, jobs, workers))


# ------------------------------------------------------ binary-search driver
def call_bound(lo: int, hi: int) -> int:
    """Decide calls allowed for a search over the ``hi - lo + 1`` values in [lo, hi]."""
    return ceil(log2(hi - lo + 1)) + 1


@dataclass
class SearchResult:
    best: Optional[int]
    calls: int
    probes: list  # (k, answer) in call order


def optimize_binary_search(family, weights, bounds: tuple[int, int],
                           validate: bool = False) -> SearchResult:
    """Largest k in ``bounds`` whose threshold instance is a yes.

    ``family(weights, k)`` returns ``(wef, x_bar)`` deciding "some solution
    has weight >= k".  The lower bound is only probed when every other probe
    said no, so at most :func:`call_bound` calls are made.  ``validate``
    also decides every k in range (uncounted) and raises
    :class:`NonMonotoneFamily` on a yes above a no.
    """
    lo, hi = bounds
    if lo > hi:
        raise ValueError("empty search range")
    probes = []

    def ask(k):
        wef, x_bar = family(weights, k)
        ans = decide(wef, x_bar).answer
        probes.append((k, ans))
        return ans

    a, b = lo, hi
    while a < b:
        mid = (a + b + 1) // 2
        if ask(mid):
            a = mid
        else:
            b = mid - 1
    best = a
    if a == lo and not ask(lo):
        best = None
    yes_at = [k for k, ans in probes if ans]
    no_at = [k for k, ans in probes if not ans]
    if yes_at and no_at and max(yes_at) > min(no_at):
        raise NonMonotoneFamily(f"yes at {max(yes_at)} above no at {min(no_at)}")
    if validate:
        seen_no = None
        for k in range(lo, hi + 1):
            ans = decide(*family(weights, k)).answer
            if ans and seen_no is not None:
                raise NonMonotoneFamily(f"yes at k={k} above a no at k={seen_no}")
            if not ans and seen_no is None:
                seen_no = k
    return SearchResult(best, len(probes), probes)


# ---------------------------------------------- weighted matching threshold
def perfect_matchings(n: int) -> list[tuple[tuple[int, int], ...]]:
    """All perfect matchings of K_n on vertices 1..n (n even)."""
    if n % 2:
        raise ValueError("perfect matchings need an even vertex count")

    def rec(rest):
        if not rest:
            yield ()
            return
        a = rest[0]
        for k in range(1, len(rest)):
            b = rest[k]
            for tail in rec(rest[1:k] + rest[k + 1:]):
                yield ((a, b),) + tail

    return list(rec(tuple(range(1, n + 1))))


def edges(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(1, n + 1), 2))


class GateBuilder:
    """Gate emitter with constant folding and xor/adder/comparator helpers."""

    def __init__(self, names):
        self.names = list(names)
        self.gates: list[Gate] = []

    def _emit(self, kind, a, b, label=""):
        self.gates.append(Gate(kind, (a, b), label or f"g{len(self.gates) + 1}"))
        return gate(len(self.gates) - 1)

    def AND(self, a: Literal, b: Literal) -> Literal:
        for u, v in ((a, b), (b, a)):
            if u.kind == "const":
                val = u.index ^ u.negated
                return v if val else const(0)
        return self._emit(AND, a, b)

    def OR(self, a: Literal, b: Literal) -> Literal:
        for u, v in ((a, b), (b, a)):
            if u.kind == "const":
                val = u.index ^ u.negated
                return const(1) if val else v
        return self._emit(OR, a, b)

    def XOR(self, a, b):
        return self.AND(self.OR(a, b), ~self.AND(a, b))

    def add(self, xs, ys):
        """Ripple-carry sum of two little-endian bit lists (one bit longer)."""
        width = max(len(xs), len(ys))
        xs = list(xs) + [const(0)] * (width - len(xs))
        ys = list(ys) + [const(0)] * (width - len(ys))
        out, carry = [], const(0)
        for a, b in zip(xs, ys):
            s = self.XOR(a, b)
            out.append(self.XOR(s, carry))
            carry = self.OR(self.AND(a, b), self.AND(carry, s))
        return out + [carry]

    def geq(self, xs, ks):
        """x >= k for little-endian bit lists."""
        width = max(len(xs), len(ks))
        xs = list(xs) + [const(0)] * (width - len(xs))
        ks = list(ks) + [const(0)] * (width - len(ks))
        ge = const(1)
        for a, b in zip(xs, ks):
            gt = self.AND(a, ~b)
            eq = ~self.XOR(a, b)
            ge = self.OR(gt, self.AND(eq, ge))
        return ge

    def finish(self, out: Literal) -> Circuit:
        if out.kind != "gate" or out.index != len(self.gates) - 1 or out.negated:
            # make the output a fresh last gate (AND with constant 1)
            self.gates.append(Gate(AND, (out, const(1)), "w"))
        else:
            g = self.gates[-1]
            self.gates[-1] = Gate(g.kind, g.inputs, "w")
        return Circuit(len(self.names), tuple(self.gates), tuple(self.names))


def weighted_matching_circuit(n: int, W: int) -> tuple[Circuit, int]:
    """Circuit on (W-bit edge weights, k bits): is there a perfect matching of
    K_n with total weight >= k?  Returns (circuit, number of k bits)."""
    es = edges(n)
    max_total = (n // 2) * (2 ** W - 1)
    kbits = max(1, max_total.bit_length())
    names = [f"w{a}{b}_{j}" for a, b in es for j in range(1, W + 1)]
    names += [f"k_{j}" for j in range(1, kbits + 1)]
    bld = GateBuilder(names)
    wbits = {e: [inp(i * W + j) for j in range(W)] for i, e in enumerate(es)}
    kb = [inp(len(es) * W + j) for j in range(kbits)]
    out = const(0)
    for pm in perfect_matchings(n):
        total = wbits[pm[0]]
        for e in pm[1:]:
            total = bld.add(total, wbits[e])
        out = bld.OR(out, bld.geq(total, kb))
    return bld.finish(out), kbits


def int_bits(v: int, width: int) -> list[int]:
    if not 0 <= v < 2 ** width:
        raise ValueError(f"{v} does not fit in {width} bits")
    return [(v >> j) & 1 for j in range(width)]


class WeightedMatchingFamily:
    """Threshold WEFs for max-weight perfect matching on K_n (one encoding,
    k supplied through input bits)."""

    def __init__(self, n: int, W: int):
        self.n, self.W = n, W
        self.circuit, self.kbits = weighted_matching_circuit(n, W)
        self.wef = encode(self.circuit)
        self.edges = edges(n)

    @property
    def max_total(self) -> int:
        return (self.n // 2) * (2 ** self.W - 1)

    def x_bar(self, weights, k: int) -> tuple:
        if len(weights) != len(self.edges):
            raise ValueError(f"need {len(self.edges)} weights")
        bits = []
        for w in weights:
            bits += int_bits(w, self.W)
        return tuple(bits + int_bits(k, self.kbits))

    def __call__(self, weights, k: int):
        return self.wef, self.x_bar(weights, k)


def max_weight_matching(n: int, weights) -> int:
    """Brute force over the perfect matchings of K_n."""
    idx = {e: i for i, e in enumerate(edges(n))}
    return max(sum(weights[idx[e]] for e in pm) for pm in perfect_matchings(n))


# -------------------------------------------------------- worked example
def q2_example() -> WEFSystem:
    """The triangle conv{(0,0,0), (1,1,1), (1/4,1,1/2)} over (x, w, s)."""
    b = LPBuilder()
    x, w, s = b.add_var("x"), b.add_var("w"), b.add_var("s")
    b.add({x: -2, w: -1, s: 3}, EQ, 0, "plane")
    b.add({x: 1, w: -1}, "<=", 0, "edge")
    b.add({x: -4, w: 1}, "<=", 0, "edge")
    b.add({w: 1}, "<=", 1, "edge")
    return WEFSystem(b.build(), (x,), w, {"vertices": 3})


__all__ = [
    "DecisionError", "DecisionInstance", "GateBuilder", "NonMonotoneFamily", "SafeD", "SearchResult",
    "Verdict", "WeightedMatchingFamily", "X01Report", "X01Row", "all_inputs",
    "build_objective", "call_bound", "check_x01", "decide", "edges", "extension", "find_safe_d",
    "int_bits", "max_weight_matching", "optimal_face_ranges", "optimize_binary_search",
    "perfect_matchings", "pmap", "q2_example", "verify_x01", "weighted_matching_circuit",
]
