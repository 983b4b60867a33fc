"""Characteristic sandwiches of binary languages and their slack matrices.

For a language slice ``L`` of bit length ``n`` the inner polytope is the hull
of ``(x, psi(x))`` over all ``x`` in {0,1}^n, and the outer one is cut out by
one row per ``a``:  ``phi(a).x + d w <= a.1 + d [a in L]`` with
``phi(a) = 2a - 1``.  Rows and columns are indexed by bitstrings in
lexicographic order throughout.
"""

from __future__ import annotations

import csv
import io
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .lp import EQ, LE, OPTIMAL, Objective, fix_vars, is_feasible, solve
from .lp.rational import bitlen, fmt_rat
from .lp.system import LPBuilder, LPSystem
from .report import Report
from .wef import WEFSystem

THIRD = Fraction(1, 3)


class SandwichError(ValueError):
    pass


def strings(n: int) -> list[tuple]:
    return list(itertools.product((0, 1), repeat=n))


def bitstr(x: Sequence[int]) -> str:
    return "".join(map(str, x))


def parse_bits(s: str) -> tuple:
    s = s.strip()
    if s and set(s) - {"0", "1"}:
        raise SandwichError(f"not a bitstring: {s!r}")
    return tuple(int(c) for c in s)


@dataclass(frozen=True)
class Language:
    n: int
    members: frozenset

    def __post_init__(self):
        for x in self.members:
            if len(x) != self.n or set(x) - {0, 1}:
                raise SandwichError(f"member {x} is not an {self.n}-bit string")

    def __contains__(self, x) -> bool:
        return tuple(x) in self.members

    def psi(self, x) -> int:
        return int(tuple(x) in self.members)

    @classmethod
    def of(cls, n: int, words: Iterable) -> "Language":
        return cls(n, frozenset(parse_bits(w) if isinstance(w, str) else tuple(w)
                                for w in words))

    @classmethod
    def from_oracle(cls, n: int, fn: Callable[[tuple], int]) -> "Language":
        return cls(n, frozenset(x for x in strings(n) if fn(x)))

    @classmethod
    def random(cls, n: int, rng: random.Random) -> "Language":
        return cls(n, frozenset(x for x in strings(n) if rng.random() < 0.5))

    def __str__(self):
        return "{" + ",".join(sorted(bitstr(x) for x in self.members)) + "}"


def all_languages(n: int) -> list[Language]:
    xs = strings(n)
    return [Language(n, frozenset(x for k, x in enumerate(xs) if mask >> k & 1))
            for mask in range(1 << len(xs))]


def _check_d(d) -> Fraction:
    d = Fraction(d)
    if not 0 < d < Fraction(1, 2):
        raise SandwichError("d must satisfy 0 < d < 1/2")
    return d


def phi(a: Sequence[int]) -> tuple:
    return tuple(1 if b else -1 for b in a)


def alpha(L: Language, a, b, d) -> Fraction:
    ia, ib = a in L, b in L
    if ia and not ib:
        return Fraction(d)
    if ib and not ia:
        return -Fraction(d)
    return Fraction(0)


def build_M(L: Language, d=THIRD) -> list[list[Fraction]]:
    d = _check_d(d)
    if L.n > 12:
        raise SandwichError("n > 12 is too large to tabulate")
    xs = strings(L.n)
    M = []
    for a in xs:
        row = []
        for b in xs:
            ab = sum(p * q for p, q in zip(a, b))
            row.append(sum(a) - 2 * ab + sum(b) + alpha(L, a, b, d))
        M.append(row)
    neg = [(bitstr(a), bitstr(b)) for a, row in zip(xs, M) for b, v in zip(xs, row) if v < 0]
    if neg:
        raise SandwichError(f"negative entry at (a, b) = {neg[0]}")
    return M


def inner_vertices(L: Language) -> list[tuple]:
    return [tuple(x) + (L.psi(x),) for x in strings(L.n)]


def outer_rows(L: Language, d=THIRD) -> list[tuple[tuple, Fraction]]:
    """(normal over (x, w), rhs) for each a, in lexicographic order."""
    d = Fraction(d)
    return [(phi(a) + (d,), sum(a) + d * L.psi(a)) for a in strings(L.n)]


def slack(rows, verts) -> list[list[Fraction]]:
    return [[Fraction(b) - sum(Fraction(p) * q for p, q in zip(a, v)) for v in verts]
            for a, b in rows]


def check_slack(L: Language, d=THIRD) -> Report:
    d = _check_d(d)
    if L.n > 8:
        raise SandwichError("slack check limited to n <= 8")
    rep = Report(f"slack of H vs V for L={L}, n={L.n}, d={fmt_rat(d)}")
    M = build_M(L, d)
    S = slack(outer_rows(L, d), inner_vertices(L))
    xs = strings(L.n)
    bad = [(bitstr(a), bitstr(b)) for i, a in enumerate(xs) for j, b in enumerate(xs)
           if S[i][j] != M[i][j]]
    if L.n <= 3:
        w = max(L.n, 2) + 2
        rep.table.append("a\\b".ljust(w) + "".join(bitstr(b).rjust(7) for b in xs))
        for a, row in zip(xs, S):
            mark = "*" if a in L else " "
            rep.table.append((bitstr(a) + mark).ljust(w) + "".join(fmt_rat(v).rjust(7) for v in row))
    rep.add(f"slack equals M entrywise ({len(xs) ** 2} entries)", not bad,
            f"first mismatch at (a, b) = {bad[0]}" if bad else "")
    rep.add("all entries nonnegative", all(v >= 0 for row in S for v in row))
    rep.data.update(S=S, M=M)
    return rep


# -------------------------------------------------- polytopes as LP systems
def hull_system(L: Language) -> WEFSystem:
    """conv(V) through convex multipliers: (x, w, lambda)."""
    b = LPBuilder()
    xs = [b.add_var(f"x{i + 1}") for i in range(L.n)]
    w = b.add_var("w")
    verts = inner_vertices(L)
    lam = [b.add_var(f"l_{bitstr(v[:-1])}") for v in verts]
    for k, var in enumerate(xs + [w]):
        terms = {var: 1}
        for j, v in enumerate(verts):
            if v[k]:
                terms[lam[j]] = -1
        b.add(terms, EQ, 0, "hull")
    b.add({j: 1 for j in lam}, EQ, 1, "convex")
    return WEFSystem(b.build(), tuple(xs), w, {"kind": "hull"})


def outer_system(L: Language, d=THIRD) -> WEFSystem:
    """H itself with free coordinates."""
    b = LPBuilder()
    xs = [b.add_var(f"x{i + 1}", None, None) for i in range(L.n)]
    w = b.add_var("w", None, None)
    for normal, rhs in outer_rows(L, d):
        b.add(dict(zip(xs + [w], normal)), LE, rhs, "H")
    return WEFSystem(b.build(), tuple(xs), w, {"kind": "outer"})


def membership_circuit(L: Language):
    """A DNF circuit deciding L(n)."""
    from .circuit import const, inp
    from .driver import GateBuilder

    bld = GateBuilder([f"x{i + 1}" for i in range(L.n)])
    out = const(0)
    for a in sorted(L.members):
        term = const(1)
        for i, bit in enumerate(a):
            term = bld.AND(term, inp(i) if bit else ~inp(i))
        out = bld.OR(out, term)
    if out.kind == "const":
        # constant languages still need one gate for the output
        out = bld._emit("AND" if out.index ^ out.negated == 0 else "OR", inp(0), ~inp(0))
    return bld.finish(out)


# ------------------------------------------------------ decision over P
@dataclass
class SandwichVerdict:
    answer: bool
    z: Fraction
    target: Fraction


def decide_over_sandwiched(P: WEFSystem, a: Sequence[int], d=THIRD) -> SandwichVerdict:
    """Maximize ``phi(a).x + d w`` over P; yes iff the optimum is ``a.1 + d``."""
    d = _check_d(d)
    a = tuple(int(v) for v in a)
    if len(a) != P.q:
        raise SandwichError(f"a has {len(a)} bits, P has {P.q} x-coordinates")
    coeffs = dict(zip(P.x_vars, phi(a)))
    coeffs[P.w_var] = d
    res = solve(P.lp, Objective.maximize(coeffs))
    if res.status != OPTIMAL:
        raise SandwichError(f"optimization over P ended {res.status}")
    target = sum(a) + d
    return SandwichVerdict(res.z_star == target, res.z_star, target)


def check_sandwiched(P: WEFSystem, L: Language, d=THIRD) -> Report:
    """V inside P (each vertex feasible) and P inside H (each row's max)."""
    rep = Report(f"V <= P <= H for L={L}")
    out_v = []
    for v in inner_vertices(L):
        fixed = fix_vars(P.lp, dict(zip(list(P.x_vars) + [P.w_var], v)))
        if not is_feasible(fixed):
            out_v.append(bitstr(v))
    rep.add("every inner vertex lies in P", not out_v, ", ".join(out_v))
    over = []
    for normal, rhs in outer_rows(L, d):
        obj = Objective.maximize(dict(zip(list(P.x_vars) + [P.w_var], normal)))
        res = solve(P.lp, obj)
        if res.status != OPTIMAL or res.z_star > rhs:
            over.append(bitstr(n > 0 for n in normal[:-1]))
    rep.add("P satisfies every outer row", not over, ", ".join(over))
    return rep


def check_decisions(P: WEFSystem, L: Language, d=THIRD) -> Report:
    rep = Report(f"decision criterion over P for L={L}")
    wrong = [bitstr(a) for a in strings(L.n)
             if decide_over_sandwiched(P, a, d).answer != (a in L)]
    rep.add(f"agrees with membership on all {2 ** L.n} inputs", not wrong, ", ".join(wrong))
    return rep


# ----------------------------------------------------------- factorizations
@dataclass
class FactorizationCheck:
    ok: bool
    max_bits: int
    problem: str = ""


def _shape(A):
    return len(A), (len(A[0]) if A else 0)


def matmul(T, U) -> list[list[Fraction]]:
    (m, r), (r2, n) = _shape(T), _shape(U)
    if m and n and r != r2:
        raise SandwichError(f"dimension mismatch: {m}x{r} times {r2}x{n}")
    return [[sum((Fraction(T[i][k]) * U[k][j] for k in range(r)), Fraction(0))
             for j in range(n)] for i in range(m)]


def verify_factorization(S, T, U) -> FactorizationCheck:
    """Exact ``S == T U`` with T, U >= 0; also the largest bit length in T."""
    (m, n), (mt, r), (ru, nu) = _shape(S), _shape(T), _shape(U)
    if mt != m or (r and ru != r) or (m and nu != n and ru):
        raise SandwichError(f"dimension mismatch: S {m}x{n}, T {mt}x{r}, U {ru}x{nu}")
    bits = max((bitlen(Fraction(v)) for row in T for v in row), default=0)
    if any(Fraction(v) < 0 for row in T for v in row):
        return FactorizationCheck(False, bits, "T has a negative entry")
    if any(Fraction(v) < 0 for row in U for v in row):
        return FactorizationCheck(False, bits, "U has a negative entry")
    P = matmul(T, U) if r else [[Fraction(0)] * n for _ in range(m)]
    for i in range(m):
        for j in range(n):
            if P[i][j] != S[i][j]:
                return FactorizationCheck(False, bits, f"(TU)[{i}][{j}] = {P[i][j]} != {S[i][j]}")
    return FactorizationCheck(True, bits)


@dataclass
class Extension:
    Q: LPSystem
    x_vars: tuple      # (x..., w) columns in Q
    y_vars: tuple
    report: Report


def extension_from_factorization(rows, verts, T, U) -> Extension:
    """``Q = {(z, y): a_i.z + T_i y = b_i, y >= 0}`` from ``slack = T U``."""
    S = slack(rows, verts)
    chk = verify_factorization(S, T, U)
    if not chk.ok:
        raise SandwichError(f"not a nonnegative factorization of the slack: {chk.problem}")
    k = len(rows[0][0])
    r = len(T[0]) if T else 0
    b = LPBuilder()
    zs = [b.add_var(f"z{i + 1}", None, None) for i in range(k)]
    ys = [b.add_var(f"y{j + 1}", 0, None) for j in range(r)]
    for i, (normal, rhs) in enumerate(rows):
        terms = dict(zip(zs, normal))
        for j in range(r):
            if T[i][j]:
                terms[ys[j]] = T[i][j]
        b.add(terms, EQ, rhs, "Q")
    Q = b.build()
    rep = Report(f"extension of size {r} from a factorization")
    over = []
    for i, (normal, rhs) in enumerate(rows):
        res = solve(Q, Objective.maximize(dict(zip(zs, normal))))
        if res.status != OPTIMAL or res.z_star > rhs:
            over.append(i)
    rep.add("projection of Q satisfies every outer row", not over, f"rows {over}" if over else "")
    missing = []
    for j, v in enumerate(verts):
        point = [Fraction(c) for c in v] + [Fraction(U[t][j]) for t in range(r)]
        if not Q.is_feasible_point(point):
            missing.append(j)
    rep.add("every inner vertex lifts with y = U column", not missing,
            f"vertices {missing}" if missing else "")
    rep.data["max_bits_T"] = chk.max_bits
    return Extension(Q, tuple(zs), tuple(ys), rep)


def identity_factorization(S):
    m = len(S)
    return [[Fraction(int(i == j)) for j in range(m)] for i in range(m)], [list(r) for r in S]


def rank(A) -> int:
    M = [[Fraction(v) for v in row] for row in A]
    r, cols = 0, len(M[0]) if M else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c] / M[r][c]
                M[i] = [u - f * v for u, v in zip(M[i], M[r])]
        r += 1
    return r


def _conic_coeffs(gens, target) -> Optional[list]:
    """Nonnegative mu with sum mu_k gens[k] == target, or None."""
    b = LPBuilder()
    mu = [b.add_var(f"mu{k}", 0, None) for k in range(len(gens))]
    for i, t in enumerate(target):
        b.add({mu[k]: g[i] for k, g in enumerate(gens) if g[i]}, EQ, t, "cone")
    sysm = b.build()
    res = solve(sysm, Objective.maximize({}))
    if res.status != OPTIMAL:
        return None
    return [res.point[m] for m in mu]


def search_factorization(S, max_rank: Optional[int] = None):
    """Smallest-r factorization whose left factor is r columns of S.

    Every column of S must be a nonnegative combination of the chosen ones.
    Returns ``(T, U)`` or None when no column subset smaller than the full
    width works.  A column-support search, not a general NMF.
    """
    m, n = _shape(S)
    cols = [[S[i][j] for i in range(m)] for j in range(n)]
    lo = max(1, rank(S))
    hi = n - 1 if max_rank is None else min(max_rank, n - 1)
    for r in range(lo, hi + 1):
        for J in itertools.combinations(range(n), r):
            gens = [cols[j] for j in J]
            U_cols = []
            for j in range(n):
                mu = _conic_coeffs(gens, cols[j])
                if mu is None:
                    break
                U_cols.append(mu)
            else:
                T = [[S[i][j] for j in J] for i in range(m)]
                U = [[U_cols[j][k] for j in range(n)] for k in range(r)]
                return T, U
    return None


# ------------------------------------------------------------------- output
def matrix_csv(M, row_labels=None, col_labels=None) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    if col_labels is not None:
        wr.writerow([""] + list(col_labels))
    for k, row in enumerate(M):
        head = [row_labels[k]] if row_labels is not None else []
        wr.writerow(head + [fmt_rat(Fraction(v)) for v in row])
    return buf.getvalue()


def read_matrix_csv(text: str, labelled: bool = True) -> list[list[Fraction]]:
    rows = list(csv.reader(io.StringIO(text)))
    if labelled:
        rows = [r[1:] for r in rows[1:]]
    return [[Fraction(v) for v in r] for r in rows if r]


def M_csv(L: Language, d=THIRD) -> str:
    labels = [bitstr(x) for x in strings(L.n)]
    return matrix_csv(build_M(L, d), labels, labels)
