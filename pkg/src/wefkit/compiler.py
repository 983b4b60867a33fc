"""Compile a basic pseudocode program into a WEF (groups C, D, E, F, G).

Line ``i`` executing at time ``t`` is signalled by ``S(i,t)``; it reads the
memory variables ``B(., t-1)`` and writes ``B(., t)``.  Every F/G row carries
``+S(i,t)`` with the right-hand side raised by one, so a row is vacuous for
0/1 points whenever its line is not the one executing.

Temporaries (increment carries, equality xor bits, array selectors) live in
the program's scratch slot region, so they are ordinary memory: copied
forward by G(i) at every step whose line does not write them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .lp.system import EQ, LE, LinConstraint, LPBuilder
from .pseudolang.ast import (
    ArrRead1,
    ArrRead2,
    ArrWrite1,
    ArrWrite2,
    AssignAnd,
    AssignConst,
    AssignCopy,
    AssignNot,
    AssignOr,
    AssignOrK,
    AssignXor,
    BasicProgram,
    EqTest,
    Goto,
    IfGoto,
    IncInt,
    Return,
    written_slots,
)
from .wef import WEFSystem

K_BOUND = 64
GROUPS = ("C", "D", "E", "F", "G")


class CompileError(ValueError):
    pass


@dataclass(frozen=True)
class CompileParams:
    W: int
    p: int
    d: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if self.W < 1:
            raise CompileError("word size W must be at least 1")
        if self.p < 1:
            raise CompileError("step budget p must be at least 1")
        d = Fraction(self.d)
        if not 0 < d <= Fraction(1, 2):
            raise CompileError("d must satisfy 0 < d <= 1/2")
        object.__setattr__(self, "d", d)


class VarLayout:
    """Dense numbering of B(s,t) (t = 0..p) and S(i,t) (t = 1..p), time-major."""

    def __init__(self, program: BasicProgram, p: int):
        sym = program.symbols
        self.q, self.l, self.p, self.W = sym.q, program.l, p, sym.W
        self.symbols = sym
        self.names: list[str] = []
        self._b: dict[tuple[int, int], int] = {}
        self._s: dict[tuple[int, int], int] = {}
        self.role: list[tuple[str, int, int]] = []
        label = self._slot_labels(sym)
        for t in range(p + 1):
            if t:
                for i in range(1, self.l + 1):
                    self._s[i, t] = len(self.names)
                    self.role.append(("S", i, t))
                    self.names.append(f"S({i},{t})")
            for s in range(1, self.q + 1):
                self._b[s, t] = len(self.names)
                self.role.append(("B", s, t))
                self.names.append(label[s].format(t=t))

    @staticmethod
    def _slot_labels(sym) -> dict[int, str]:
        out = {s: f"B({s},{{t}})" for s in range(1, sym.q + 1)}
        ints = list(sym.ints.values()) + ([sym.carry] if sym.carry else [])
        for iv in ints:
            for j in range(1, iv.width + 1):
                out[iv.slot(j)] = f"I({iv.index},{j},{{t}})"
        for j, s in enumerate(sym.sel_m):
            out[s] = f"M({j},{{t}})"
        for j, s in enumerate(sym.sel_n):
            out[s] = f"N({j},{{t}})"
        return out

    @property
    def num_vars(self) -> int:
        return len(self.names)

    def B(self, s: int, t: int) -> int:
        return self._b[s, t]

    def S(self, i: int, t: int) -> int:
        return self._s[i, t]

    def describe(self, v: int) -> tuple[str, int, int]:
        """Inverse map: variable index -> (role, slot or line, time)."""
        return self.role[v]


# ------------------------------------------------------------ row building
# An operand is an affine function of at most one variable:
# ("v", j) = x_j, ("n", j) = 1 - x_j, ("c", b) = constant b.
def _v(j):
    return ("v", j)


def _neg(op):
    kind, val = op
    if kind == "v":
        return ("n", val)
    if kind == "n":
        return ("v", val)
    return ("c", 1 - val)


def _row(parts, rhs, tag) -> LinConstraint:
    coeffs: dict[int, int] = {}
    for coef, (kind, val) in parts:
        if kind == "v":
            coeffs[val] = coeffs.get(val, 0) + coef
        elif kind == "n":
            rhs -= coef
            coeffs[val] = coeffs.get(val, 0) - coef
        else:
            rhs -= coef * val
    return LinConstraint.make(coeffs, LE, rhs, tag)


def _copy(S, x, s, tag):
    """s := x (x may be negated or constant)."""
    return [_row([(1, S), (1, x), (-1, s)], 1, tag),
            _row([(1, S), (-1, x), (1, s)], 1, tag)]


def _xor(S, a, b, s, tag):
    return [_row([(1, S), (1, a), (-1, b), (-1, s)], 1, tag),
            _row([(1, S), (-1, a), (-1, b), (1, s)], 1, tag),
            _row([(1, S), (-1, a), (1, b), (-1, s)], 1, tag),
            _row([(1, S), (1, a), (1, b), (1, s)], 3, tag)]


def _and(S, a, b, s, tag):
    return [_row([(1, S), (-1, a), (1, s)], 1, tag),
            _row([(1, S), (-1, b), (1, s)], 1, tag),
            _row([(1, S), (1, a), (1, b), (-1, s)], 2, tag)]


def _or(S, a, b, s, tag):
    return [_row([(1, S), (1, a), (-1, s)], 1, tag),
            _row([(1, S), (1, b), (-1, s)], 1, tag),
            _row([(1, S), (-1, a), (-1, b), (1, s)], 1, tag)]


def _or_k(S, srcs, s, tag):
    rows = [_row([(1, S), (1, a), (-1, s)], 1, tag) for a in srcs]
    rows.append(_row([(1, S)] + [(-1, a) for a in srcs] + [(1, s)], 1, tag))
    return rows


def _selector(S, idx_ops, j, sel, tag):
    """sel := 0 iff the W-bit index equals j (W-way or of the T_j terms)."""
    T = [op if not (j >> k) & 1 else _neg(op) for k, op in enumerate(idx_ops)]
    return _or_k(S, T, sel, tag)


def _int_ops(layout, iv, t):
    return [_v(layout.B(iv.slot(k), t)) for k in range(1, iv.width + 1)]


def _line_target(layout, k, t):
    if not 1 <= k <= layout.l:
        raise CompileError(f"jump target {k} outside 1..{layout.l}")
    return layout.S(k, t)


def gen_group(stmt, i: int, t: int, layout: VarLayout) -> list[LinConstraint]:
    """Template rows of line ``i`` at time ``t``.

    Control statements yield their F rows (needs ``t < p``); assignments yield
    their G rows.  The F(i) successor row of an assignment and the G(i)
    copies of untouched slots are added by :func:`compile_program`.
    """
    S = _v(layout.S(i, t))
    sym = layout.symbols
    B0 = lambda s: _v(layout.B(s, t - 1))  # noqa: E731
    B1 = lambda s: _v(layout.B(s, t))  # noqa: E731
    if isinstance(stmt, Goto):
        return [_row([(1, S), (-1, _v(_line_target(layout, stmt.target, t + 1)))], 0, "F(ii)")]
    if isinstance(stmt, Return):
        return [_row([(1, S), (-1, _v(layout.S(i, t + 1)))], 0, "F(iii)")]
    if isinstance(stmt, IfGoto):
        jump = _v(_line_target(layout, stmt.target, t + 1))
        fall = _v(_line_target(layout, i + 1, t + 1))
        c = B0(stmt.cond)
        return [_row([(1, S), (1, c), (-1, jump)], 1, "F(iv)"),
                _row([(1, S), (-1, c), (-1, fall)], 0, "F(iv)")]
    if isinstance(stmt, AssignConst):
        return _copy(S, ("c", stmt.value), B1(stmt.dst), "G(ii)")
    if isinstance(stmt, AssignCopy):
        return _copy(S, B0(stmt.src), B1(stmt.dst), "G(ii)")
    if isinstance(stmt, AssignNot):
        x, s = B0(stmt.src), B1(stmt.dst)
        return [_row([(1, S), (1, x), (1, s)], 2, "G(ii)"),
                _row([(1, S), (-1, x), (-1, s)], 0, "G(ii)")]
    if isinstance(stmt, AssignXor):
        return _xor(S, B0(stmt.a), B0(stmt.b), B1(stmt.dst), "G(iii)")
    if isinstance(stmt, AssignAnd):
        return _and(S, B0(stmt.a), B0(stmt.b), B1(stmt.dst), "G(iv)")
    if isinstance(stmt, AssignOr):
        return _or(S, B0(stmt.a), B0(stmt.b), B1(stmt.dst), "G(v)")
    if isinstance(stmt, AssignOrK):
        return _or_k(S, [B0(a) for a in stmt.srcs], B1(stmt.dst), "G(v)")
    if isinstance(stmt, IncInt):
        iv, cr = sym.ints[stmt.var], sym.carry
        rows = []
        carry = ("c", 1)
        for j in range(1, iv.width + 1):
            q_old, q_new, r = B0(iv.slot(j)), B1(iv.slot(j)), B1(cr.slot(j))
            rows += _xor(S, q_old, carry, q_new, "G(vi)")
            rows += _and(S, q_old, carry, r, "G(vi)")
            carry = r
        return rows
    if isinstance(stmt, EqTest):
        a, b = sym.ints[stmt.a], sym.ints[stmt.b]
        rows = []
        E = [B1(s) for s in sym.eq_bits]
        for j in range(1, sym.W + 1):
            rows += _xor(S, B0(a.slot(j)), B0(b.slot(j)), E[j - 1], "G(vii)")
        dst = B1(stmt.dst)
        rows += [_row([(1, S), (1, e), (1, dst)], 2, "G(vii)") for e in E]
        rows.append(_row([(1, S)] + [(-1, e) for e in E] + [(-1, dst)], 0, "G(vii)"))
        return rows
    if isinstance(stmt, (ArrRead1, ArrWrite1)):
        av = sym.arrays[stmt.arr]
        idx = _int_ops(layout, sym.ints[stmt.idx], t - 1)
        rows = []
        M = [B1(sym.sel_m[j]) for j in range(av.rows)]
        for j in range(av.rows):
            rows += _selector(S, idx, j, M[j], "G(viii)")
        for j in range(av.rows):
            old, new = B0(av.slot(j)), B1(av.slot(j))
            if isinstance(stmt, ArrWrite1):
                x = B0(stmt.src)
                rows += [_row([(1, S), (1, x), (-1, new), (-1, M[j])], 1, "G(viii)"),
                         _row([(1, S), (-1, x), (1, new), (-1, M[j])], 1, "G(viii)"),
                         _row([(1, S), (1, old), (-1, new), (1, M[j])], 2, "G(viii)"),
                         _row([(1, S), (-1, old), (1, new), (1, M[j])], 2, "G(viii)")]
            else:
                x = B1(stmt.dst)
                rows += [_row([(1, S), (1, x), (-1, old), (-1, M[j])], 1, "G(viii)"),
                         _row([(1, S), (-1, x), (1, old), (-1, M[j])], 1, "G(viii)")]
        return rows
    if isinstance(stmt, (ArrRead2, ArrWrite2)):
        av = sym.arrays[stmt.arr]
        ridx = _int_ops(layout, sym.ints[stmt.row], t - 1)
        cidx = _int_ops(layout, sym.ints[stmt.col], t - 1)
        M = [B1(sym.sel_m[j]) for j in range(av.rows)]
        N = [B1(sym.sel_n[j]) for j in range(av.cols)]
        rows = []
        for j in range(av.rows):
            rows += _selector(S, ridx, j, M[j], "G(ix)")
        for j in range(av.cols):
            rows += _selector(S, cidx, j, N[j], "G(ix)")
        for j1 in range(av.rows):
            for j2 in range(av.cols):
                r = av.slot(j1, j2)  # row-major: j1 * cols + j2
                old, new, m, n = B0(r), B1(r), M[j1], N[j2]
                if isinstance(stmt, ArrWrite2):
                    x = B0(stmt.src)
                    rows += [
                        _row([(1, S), (1, x), (-1, new), (-1, m), (-1, n)], 1, "G(ix)"),
                        _row([(1, S), (-1, x), (1, new), (-1, m), (-1, n)], 1, "G(ix)"),
                        _row([(1, S), (1, old), (-1, new), (1, m)], 2, "G(ix)"),
                        _row([(1, S), (-1, old), (1, new), (1, m)], 2, "G(ix)"),
                        _row([(1, S), (1, old), (-1, new), (1, n)], 2, "G(ix)"),
                        _row([(1, S), (-1, old), (1, new), (1, n)], 2, "G(ix)"),
                    ]
                else:
                    x = B1(stmt.dst)
                    rows += [
                        _row([(1, S), (1, x), (-1, old), (-1, m), (-1, n)], 1, "G(ix)"),
                        _row([(1, S), (-1, x), (1, old), (-1, m), (-1, n)], 1, "G(ix)"),
                    ]
        return rows
    raise CompileError(f"unknown statement kind {type(stmt).__name__}")


def flow_row(stmt, i: int, t: int, layout: VarLayout) -> Optional[LinConstraint]:
    """F(i) for assignment lines: the next line runs at t+1."""
    if isinstance(stmt, (Goto, IfGoto, Return)):
        return None
    S = _v(layout.S(i, t))
    return _row([(1, S), (-1, _v(_line_target(layout, i + 1, t + 1)))], 0, "F(i)")


def copy_rows(i: int, t: int, slots: Iterable[int], layout: VarLayout) -> list[LinConstraint]:
    """G(i): keep each listed slot unchanged from t-1 to t while line i runs."""
    S = _v(layout.S(i, t))
    rows = []
    for s in slots:
        rows += _copy(S, _v(layout.B(s, t - 1)), _v(layout.B(s, t)), "G(i)")
    return rows


def _check(program: BasicProgram, params: CompileParams):
    sym = program.symbols
    if params.W != sym.W:
        raise CompileError(f"program word size {sym.W} differs from W={params.W}")
    if params.p < program.l:
        raise CompileError(f"step budget p={params.p} is below the line count l={program.l}")
    if sym.output is None:
        raise CompileError("program has no output bit")
    last = program.stmts[-1]
    if not isinstance(last, (Goto, Return)):
        raise CompileError("the last line must be `return` or `go to`: "
                           "control would run past it")
    for i, stmt in enumerate(program.stmts, 1):
        for k in ([stmt.target] if isinstance(stmt, (Goto, IfGoto)) else []):
            if not 1 <= k <= program.l:
                raise CompileError(f"line {i}: jump target {k} outside 1..{program.l}")


def compile_program(program: BasicProgram, params: CompileParams) -> WEFSystem:
    """Emit the WEF polytope of ``program`` over ``params.p`` time steps."""
    _check(program, params)
    sym = program.symbols
    lay = VarLayout(program, params.p)
    p, l = params.p, program.l
    b = LPBuilder()
    for nm in lay.names:
        b.add_var(nm)
    rows = b.constraints
    inputs = set(sym.inputs)
    for s in range(1, sym.q + 1):
        if s not in inputs:
            rows.append(LinConstraint.make({lay.B(s, 0): 1}, EQ, 0, "C"))
    rows.append(LinConstraint.make({lay.S(1, 1): 1}, EQ, 1, "D"))
    all_slots = range(1, sym.q + 1)
    keep = [sorted(set(all_slots) - written_slots(st, sym)) for st in program.stmts]
    for t in range(1, p + 1):
        rows.append(LinConstraint.make({lay.S(i, t): 1 for i in range(1, l + 1)}, EQ, 1, "E"))
        for i, stmt in enumerate(program.stmts, 1):
            control = isinstance(stmt, (Goto, IfGoto, Return))
            if t < p:
                f = flow_row(stmt, i, t, lay)
                if f is not None:
                    rows.append(f)
            if t < p or not control:
                rows.extend(gen_group(stmt, i, t, lay))
            rows.extend(copy_rows(i, t, keep[i - 1], lay))
    lp = b.build()
    templates = lp.tag_counts()
    groups = {g: 0 for g in GROUPS}
    for tag, n in templates.items():
        groups[tag[0]] += n
    stats = {
        "num_constraints": lp.num_constraints,
        "num_vars": lp.num_vars,
        "q": sym.q,
        "l": l,
        "p": p,
        "W": params.W,
        "groups": groups,
        "templates": templates,
    }
    x_vars = tuple(lay.B(s, 0) for s in sym.inputs)
    return WEFSystem(lp, x_vars, lay.B(sym.output, p), stats)


compile = compile_program  # noqa: A001 - the natural name for the entry point


# ------------------------------------------------------- controlled templates
def controller_of(row: LinConstraint, names: Sequence[str]) -> int:
    """The S(i,t) variable entering the row with coefficient +1."""
    ctl = [j for j, a in row.terms if a > 0 and names[j].startswith("S(")]
    if len(ctl) != 1:
        raise CompileError(f"row {row.tag} has {len(ctl)} controlling step variables")
    return ctl[0]


def vacuous_when_off(row: LinConstraint, controller: int, max_free: int = 16) -> bool:
    """With the controller at 0, does the row hold for every 0/1 point?"""
    others = [(j, a) for j, a in row.terms if j != controller]
    if len(others) > max_free:
        raise CompileError(f"row {row.tag} has {len(others)} free variables")
    for bits in itertools.product((0, 1), repeat=len(others)):
        lhs = sum(a * b for (_, a), b in zip(others, bits))
        if row.sense == LE and lhs > row.rhs or row.sense == EQ and lhs != row.rhs:
            return False
    return True


def check_controlled(wef: WEFSystem) -> tuple[int, list]:
    """Enumerate every F/G row: (rows checked, rows that bind with S = 0)."""
    names = wef.lp.names
    bad, n = [], 0
    for k, row in enumerate(wef.lp.constraints):
        if row.tag[:1] not in ("F", "G"):
            continue
        n += 1
        if not vacuous_when_off(row, controller_of(row, names)):
            bad.append(k)
    return n, bad


class StatsError(AssertionError):
    pass


@dataclass
class StatsReport:
    num_constraints: int
    num_vars: int
    constraint_bound: int
    var_bound: int
    groups: dict = field(default_factory=dict)
    K: int = K_BOUND

    @property
    def ok(self) -> bool:
        return self.num_constraints <= self.constraint_bound and self.num_vars <= self.var_bound

    def lines(self) -> list[str]:
        out = [f"constraints {self.num_constraints} <= K*p*q*W = {self.constraint_bound}",
               f"variables   {self.num_vars} <= K*p*q   = {self.var_bound}",
               f"K = {self.K}"]
        out += [f"group {g}: {n}" for g, n in self.groups.items()]
        return out


def stats_check(wef: WEFSystem, params: CompileParams, program: BasicProgram,
                K: int = K_BOUND) -> StatsReport:
    """Size bound check: rows <= K*p*q*W and variables <= K*p*q."""
    q = max(program.symbols.q, 1)
    rep = StatsReport(
        num_constraints=wef.lp.num_constraints,
        num_vars=wef.lp.num_vars,
        constraint_bound=K * params.p * q * params.W,
        var_bound=K * params.p * q,
        groups=dict(wef.stats.get("groups", {})),
        K=K,
    )
    if not rep.ok:
        raise StatsError("; ".join(rep.lines()[:2]))
    return rep


def trace_assignment(layout: VarLayout, trace, upto: Optional[int] = None) -> dict[int, int]:
    """Expected 0/1 value of every layout variable with t <= upto, from a trace."""
    upto = layout.p if upto is None else upto
    out = {}
    for v, (role, k, t) in enumerate(layout.role):
        if t > upto:
            continue
        if role == "B":
            out[v] = trace.history[t][k - 1]
        else:
            out[v] = int(trace.line_at[t - 1] == k)
    return out

