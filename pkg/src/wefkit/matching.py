"""Perfect-matching polytope lab.

PM_n is handled through its vertex list: one point ``(x, w_x)`` per graph on
``n`` labelled vertices, ``x`` the edge vector in lexicographic ``ij`` order
and ``w_x`` the perfect-matching bit.  Graphs are int bitmasks over that edge
order (bit ``k`` is the ``k``-th edge).
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .report import Report

HALF = Fraction(1, 2)


class GraphError(ValueError):
    pass


@lru_cache(maxsize=None)
def edges(n: int) -> tuple:
    return tuple(itertools.combinations(range(1, n + 1), 2))


def edge_index(n: int) -> dict:
    return {e: k for k, e in enumerate(edges(n))}


def _even(n: int):
    if n < 2 or n % 2:
        raise GraphError(f"n must be a positive even vertex count, got {n}")


def to_mask(x: Sequence[int]) -> int:
    return sum(1 << k for k, b in enumerate(x) if b)


def to_bits(mask: int, n: int) -> tuple:
    return tuple((mask >> k) & 1 for k in range(len(edges(n))))


def graph(n: int, edge_list: Iterable) -> tuple:
    """Edge vector of the graph with the given edges (pairs or "ij" strings)."""
    idx = edge_index(n)
    x = [0] * len(idx)
    for e in edge_list:
        if isinstance(e, str):
            if len(e) != 2:
                raise GraphError(f"edge {e!r}: use two digits like '12'")
            e = (int(e[0]), int(e[1]))
        a, b = sorted(e)
        if (a, b) not in idx:
            raise GraphError(f"no edge {a}{b} in K_{n}")
        x[idx[(a, b)]] = 1
    return tuple(x)


@lru_cache(maxsize=None)
def matching_masks(n: int) -> tuple:
    """Bitmasks of the (n-1)!! perfect matchings of K_n."""
    _even(n)
    idx = edge_index(n)

    def rec(rest):
        if not rest:
            yield 0
            return
        a = rest[0]
        for k in range(1, len(rest)):
            bit = 1 << idx[(a, rest[k])]
            for tail in rec(rest[1:k] + rest[k + 1:]):
                yield bit | tail

    return tuple(rec(tuple(range(1, n + 1))))


def _has_pm_mask(n: int, g: int) -> int:
    return int(any(pm & g == pm for pm in matching_masks(n)))


def has_pm(n: int, x: Sequence[int]) -> int:
    _even(n)
    if len(x) != len(edges(n)):
        raise GraphError(f"edge vector needs {len(edges(n))} entries for n={n}")
    return _has_pm_mask(n, to_mask(x))


def double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@lru_cache(maxsize=4)
def pm_vertices(n: int) -> tuple:
    """(mask, w) for all 2^C(n,2) graphs: the point set whose hull is PM_n."""
    _even(n)
    return tuple((g, _has_pm_mask(n, g)) for g in range(1 << len(edges(n))))


def _pop(v: int) -> int:
    return bin(v).count("1")


# ----------------------------------------------------------- face EP_n
def check_ep_face(n: int) -> Report:
    """``1.x + (1 - w) n^2 >= n/2`` is valid and tight exactly on (M, 1)."""
    rep = Report(f"EP_{n} as a face of PM_{n}")
    verts = pm_vertices(n)
    half = Fraction(n, 2)
    lhs = lambda g, w: _pop(g) + (1 - w) * n * n  # noqa: E731
    bad = [(g, w) for g, w in verts if lhs(g, w) < half]
    rep.add("inequality valid on every vertex", not bad,
            f"{len(verts)} vertices" if not bad else f"violated at {to_bits(bad[0][0], n)}")
    tight = {(g, w) for g, w in verts if lhs(g, w) == half}
    pms = {(pm, 1) for pm in matching_masks(n)}
    rep.add("tight vertices are exactly the perfect matchings", tight == pms,
            f"{len(tight)} tight")
    expect = double_factorial(n - 1)
    rep.add(f"tight count equals (n-1)!! = {expect}", len(tight) == expect)
    rep.data["tight"] = len(tight)
    return rep


# ------------------------------------------------------- optimization
def objective_coeffs(x_bar: Sequence[int]) -> tuple:
    return tuple(1 if b else -1 for b in x_bar)


def optimize_vertices(n: int, x_bar: Sequence[int], d=HALF):
    """Max of ``c(x_bar).x + d w`` over the vertex list: (z*, maximizers)."""
    d = Fraction(d)
    xb = to_mask(x_bar)
    m = _pop(xb)
    full = (1 << len(edges(n))) - 1
    best, arg = None, []
    for g, w in pm_vertices(n):
        # c.x = |g & xb| - |g & ~xb|
        z = _pop(g & xb) - _pop(g & ~xb & full) + d * w
        if best is None or z > best:
            best, arg = z, [(g, w)]
        elif z == best:
            arg.append((g, w))
    assert best <= m + d
    return Fraction(best), arg


def check_objective(n: int, x_bar: Sequence[int], d=HALF) -> Report:
    d = Fraction(d)
    x_bar = tuple(int(b) for b in x_bar)
    if len(x_bar) != len(edges(n)):
        raise GraphError(f"x_bar needs {len(edges(n))} entries for n={n}")
    rep = Report(f"objective over PM_{n} vertices, x_bar={''.join(map(str, x_bar))}, d={d}")
    m = sum(x_bar)
    yes = has_pm(n, x_bar)
    z, arg = optimize_vertices(n, x_bar, d)
    want = m + d if yes else Fraction(m)
    rep.add(f"z* = {'m + d' if yes else 'm'} = {want}", z == want, f"got {z}")
    rep.add("maximizer unique and equal to (x_bar, w_x_bar)",
            arg == [(to_mask(x_bar), yes)], f"{len(arg)} maximizer(s)")
    rep.data.update(z_star=z, m=m, yes=yes)
    return rep


def random_objectives(n: int, count: int, seed: int = 0, d=HALF) -> list:
    rng = random.Random(seed)
    k = len(edges(n))
    return [check_objective(n, [rng.randint(0, 1) for _ in range(k)], d) for _ in range(count)]


# ------------------------------------------------------------ odd sets
def ep_rows(n: int) -> list:
    """EP_n rows as (kind, vertex set, edge mask): degree rows (= 1) and
    odd-set cut rows (>= 1)."""
    _even(n)
    idx = edge_index(n)
    V = range(1, n + 1)

    def cut(S):
        return sum(1 << idx[(a, b)] for a, b in edges(n) if (a in S) != (b in S))

    rows = [("degree", (v,), cut({v})) for v in V]
    for size in range(3, n, 2):
        for S in itertools.combinations(V, size):
            rows.append(("odd", S, cut(set(S))))
    return rows


def satisfies_ep(n: int, g: int, rows=None) -> bool:
    for kind, _, mask in rows or ep_rows(n):
        c = _pop(g & mask)
        if (kind == "degree" and c != 1) or (kind == "odd" and c < 1):
            return False
    return True


def check_odd_set(n: int) -> Report:
    rep = Report(f"odd-set description of EP_{n}")
    rows = ep_rows(n)
    pms = set(matching_masks(n))
    bad = [pm for pm in pms if not satisfies_ep(n, pm, rows)]
    rep.add("every perfect matching satisfies all rows (degree rows with equality)",
            not bad, f"{len(rows)} rows, {len(pms)} matchings")
    sat = {g for g in range(1 << len(edges(n))) if satisfies_ep(n, g, rows)}
    rep.add("0/1 points satisfying the system are exactly the perfect matchings",
            sat == pms, f"{len(sat)} feasible 0/1 points")
    return rep


# -------------------------------------------------------------- facets
def is_hypo_matchable(n: int, S: int) -> bool:
    full = (1 << len(edges(n))) - 1
    if S == full or _has_pm_mask(n, S):
        return False
    return all(_has_pm_mask(n, S | (1 << k)) for k in range(len(edges(n)))
               if not S >> k & 1)


def hypo_matchable_sets(n: int) -> list:
    return [S for S in range(1 << len(edges(n))) if is_hypo_matchable(n, S)]


def det(matrix) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    A = [[Fraction(v) for v in row] for row in matrix]
    size = len(A)
    if any(len(r) != size for r in A):
        raise ValueError("determinant of a non-square matrix")
    sign, prev = 1, Fraction(1)
    for k in range(size - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if A[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev
        prev = A[k][k]
    return sign * A[-1][-1] if size else Fraction(1)


def facet_matrix(n: int):
    """Tight graphs for the matching inequality of M = {12, 34, ...}.

    Returns ``(A, columns, template)``: ``A`` has one row per graph with the
    edge columns reordered as (edges outside M, edges of M, w), and
    ``template`` is the expected block pattern.
    """
    _even(n)
    half = n // 2
    idx = edge_index(n)
    M = [(2 * i + 1, 2 * i + 2) for i in range(half)]
    Mset = set(M)
    Et = [e for e in edges(n) if e not in Mset]
    t = len(Et)
    assert t == 2 * half * (half - 1)
    cols = Et + M
    Mmask = sum(1 << idx[e] for e in M)
    graphs = [Mmask | (1 << idx[e]) for e in Et]
    graphs += [Mmask & ~(1 << idx[e]) for e in M]
    graphs.append(Mmask)
    A = [[(g >> idx[e]) & 1 for e in cols] + [_has_pm_mask(n, g)] for g in graphs]
    T = []
    for r in range(t):
        T.append([int(r == c) for c in range(t)] + [1] * half + [1])
    for r in range(half):
        T.append([0] * t + [int(r != c) for c in range(half)] + [0])
    T.append([0] * t + [1] * half + [1])
    return A, cols, T


def matching_ineq_tight(n: int, M_mask: int, g: int, w: int) -> bool:
    return w == _pop(g & M_mask) - n // 2 + 1


def check_facets(n: int) -> Report:
    rep = Report(f"valid inequalities and facets of PM_{n}")
    verts = pm_vertices(n)
    half = n // 2
    bad = [(pm, g) for pm in matching_masks(n) for g, w in verts
           if w < _pop(g & pm) - half + 1]
    rep.add("matching inequality valid for every perfect matching",
            not bad, f"{len(matching_masks(n))} inequalities x {len(verts)} vertices")
    full = (1 << len(edges(n))) - 1
    hypo = hypo_matchable_sets(n)
    bad = [(S, g) for S in hypo for g, w in verts if w > _pop(g & full & ~S)]
    rep.add("hypo-matchable inequality valid for every hypo-matchable set",
            not bad and bool(hypo), f"{len(hypo)} hypo-matchable sets")
    A, cols, T = facet_matrix(n)
    rep.add("construction matches the block template", A == T,
            f"{len(A)}x{len(A[0])}")
    M_mask = to_mask([int(e in cols[-half:]) for e in edges(n)])
    idx = edge_index(n)
    tight = all(matching_ineq_tight(n, M_mask, sum(r[k] << idx[e] for k, e in enumerate(cols)),
                                    r[-1]) for r in A)
    rep.add("every row is a tight vertex", tight)
    D = det(A)
    rep.add("matrix nonsingular under exact elimination", D != 0, f"det = {D}")
    rep.data.update(size=len(A), det=D, hypo=len(hypo))
    return rep


def check_cross_oracle() -> Report:
    """has_pm against the small PM_4 circuit on all 64 graphs."""
    from .circuit import evaluate, pm4_circuit, pm4_circuit_padded

    rep = Report("matching oracle vs PM_4 circuits")
    for name, c in (("5-gate", pm4_circuit()), ("7-gate", pm4_circuit_padded())):
        diff = [x for x in itertools.product((0, 1), repeat=6)
                if evaluate(c, x)[0] != has_pm(4, x)]
        rep.add(f"{name} circuit agrees on 64 graphs", not diff)
    return rep


def run_all(n: int, seed: int = 0, samples: int = 20) -> list:
    reps = [check_ep_face(n), check_odd_set(n)]
    if n <= 6:
        reps += random_objectives(n, samples if n <= 4 else 3, seed)
    if n in (4, 6):
        reps.append(check_facets(n))
    if n == 4:
        reps.append(check_cross_oracle())
    return reps
