"""Exact bound propagation.

Every tightening below is implied by a single row plus the current bounds,
so the tightened box contains the whole feasible set.  Rows whose activity
range already lies inside their sides are dropped as redundant.  The reduced
problem has the same feasible set and the same optimum as the input.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional

from .system import EQ, GE, LE, LPSystem

# Per-variable cap on tightenings; only limits work, never soundness.
MAX_TIGHTEN = 24


def _num(q):
    """Fraction -> int when integral (int arithmetic is much faster)."""
    if q is None or isinstance(q, int):
        return q
    return q.numerator if q.denominator == 1 else q


def _div(x, a: int):
    if isinstance(x, int) and x % a == 0:
        return x // a
    return _num(Fraction(x) / a)


@dataclass
class Rows:
    """Rows scaled to integer coefficients, as two-sided ranges lo <= a.x <= hi."""

    coef: list[list[tuple[int, int]]]
    lo: list
    hi: list
    source: list[int]

    @classmethod
    def from_system(cls, system: LPSystem) -> "Rows":
        coef, lo, hi, src = [], [], [], []
        for k, c in enumerate(system.constraints):
            scale = 1
            for _, a in c.terms:
                scale = lcm(scale, a.denominator)
            terms = [(j, int(a * scale)) for j, a in c.terms]
            rhs = _num(c.rhs * scale)
            coef.append(terms)
            lo.append(rhs if c.sense in (GE, EQ) else None)
            hi.append(rhs if c.sense in (LE, EQ) else None)
            src.append(k)
        return cls(coef, lo, hi, src)


@dataclass
class Presolved:
    infeasible: bool
    lower: list
    upper: list
    active: list[int]  # indices into Rows of non-redundant rows
    rows: Rows

    def fixed(self, j: int) -> bool:
        lo, hi = self.lower[j], self.upper[j]
        return lo is not None and hi is not None and lo == hi

    def free_vars(self) -> list[int]:
        return [j for j in range(len(self.lower)) if not self.fixed(j)]


def propagate(system: LPSystem, rows: Optional[Rows] = None) -> Presolved:
    rows = rows or Rows.from_system(system)
    n = system.num_vars
    lower = [_num(b) for b in system.lower]
    upper = [_num(b) for b in system.upper]
    for j in range(n):
        if lower[j] is not None and upper[j] is not None and lower[j] > upper[j]:
            return Presolved(True, lower, upper, [], rows)

    occurs: list[list[int]] = [[] for _ in range(n)]
    for r, terms in enumerate(rows.coef):
        for j, _ in terms:
            occurs[j].append(r)

    budget = [MAX_TIGHTEN] * n
    queue = deque(range(len(rows.coef)))
    queued = [True] * len(rows.coef)

    while queue:
        r = queue.popleft()
        queued[r] = False
        terms = rows.coef[r]
        lo_r, hi_r = rows.lo[r], rows.hi[r]

        minact = maxact = 0
        min_inf = max_inf = 0
        min_inf_j = max_inf_j = -1
        for j, a in terms:
            if a > 0:
                lb, ub = lower[j], upper[j]
            else:
                lb, ub = upper[j], lower[j]
            if lb is None:
                min_inf += 1
                min_inf_j = j
            else:
                minact += a * lb
            if ub is None:
                max_inf += 1
                max_inf_j = j
            else:
                maxact += a * ub

        if hi_r is not None and min_inf == 0 and minact > hi_r:
            return Presolved(True, lower, upper, [], rows)
        if lo_r is not None and max_inf == 0 and maxact < lo_r:
            return Presolved(True, lower, upper, [], rows)

        for j, a in terms:
            if budget[j] <= 0:
                continue
            new_lo = new_hi = None
            if hi_r is not None and (min_inf == 0 or (min_inf == 1 and min_inf_j == j)):
                if min_inf == 0:
                    own = a * (lower[j] if a > 0 else upper[j])
                    rest = minact - own
                else:
                    rest = minact
                bound = _div(hi_r - rest, a)
                if a > 0:
                    new_hi = bound
                else:
                    new_lo = bound
            if lo_r is not None and (max_inf == 0 or (max_inf == 1 and max_inf_j == j)):
                if max_inf == 0:
                    own = a * (upper[j] if a > 0 else lower[j])
                    rest = maxact - own
                else:
                    rest = maxact
                bound = _div(lo_r - rest, a)
                if a > 0:
                    if new_lo is None or bound > new_lo:
                        new_lo = bound
                else:
                    if new_hi is None or bound < new_hi:
                        new_hi = bound
            changed = False
            if new_hi is not None and (upper[j] is None or new_hi < upper[j]):
                upper[j] = new_hi
                changed = True
            if new_lo is not None and (lower[j] is None or new_lo > lower[j]):
                lower[j] = new_lo
                changed = True
            if changed:
                if lower[j] is not None and upper[j] is not None and lower[j] > upper[j]:
                    return Presolved(True, lower, upper, [], rows)
                budget[j] -= 1
                for r2 in occurs[j]:
                    if not queued[r2] and r2 != r:
                        queued[r2] = True
                        queue.append(r2)
                # the activity sums are stale once a bound moves; revisit this row
                if not queued[r]:
                    queued[r] = True
                    queue.append(r)
                break

    active = []
    for r, terms in enumerate(rows.coef):
        minact = maxact = 0
        inf_lo = inf_hi = False
        for j, a in terms:
            lb, ub = (lower[j], upper[j]) if a > 0 else (upper[j], lower[j])
            if lb is None:
                inf_lo = True
            else:
                minact += a * lb
            if ub is None:
                inf_hi = True
            else:
                maxact += a * ub
        lo_ok = rows.lo[r] is None or (not inf_lo and minact >= rows.lo[r])
        hi_ok = rows.hi[r] is None or (not inf_hi and maxact <= rows.hi[r])
        if not (lo_ok and hi_ok):
            active.append(r)
    return Presolved(False, lower, upper, active, rows)
