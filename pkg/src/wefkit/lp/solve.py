"""Public LP entry points: :func:`solve`, :func:`var_range`, :func:`var_ranges`."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Optional, Sequence

from .presolve import Presolved, Rows, propagate
from .simplex import SimplexError, Tableau
from .system import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LPSystem,
    Objective,
    OptResult,
)


class InfeasibleSystem(ValueError):
    """Raised by range queries on an empty polytope."""


class _Reduced:
    """The presolved problem restricted to the variables presolve left free."""

    def __init__(self, system: LPSystem, pre: Presolved):
        self.system = system
        self.pre = pre
        self.free = pre.free_vars()
        self.pos = {j: k for k, j in enumerate(self.free)}
        fixed_val = {j: pre.lower[j] for j in range(system.num_vars) if pre.fixed(j)}
        self.fixed_val = fixed_val
        coef, lo, hi = [], [], []
        rows = pre.rows
        for r in pre.active:
            shift = 0
            terms = []
            for j, a in rows.coef[r]:
                if j in fixed_val:
                    shift += a * fixed_val[j]
                else:
                    terms.append((self.pos[j], a))
            rlo = None if rows.lo[r] is None else rows.lo[r] - shift
            rhi = None if rows.hi[r] is None else rows.hi[r] - shift
            if not terms:
                # all variables fixed but presolve kept the row: it is violated
                self.infeasible = True
                return
            coef.append(terms)
            lo.append(rlo)
            hi.append(rhi)
        self.infeasible = False
        self.coef, self.row_lo, self.row_hi = coef, lo, hi
        self.lower = [pre.lower[j] for j in self.free]
        self.upper = [pre.upper[j] for j in self.free]

    def tableau(self, start=None) -> Tableau:
        st = None if start is None else [start[j] for j in self.free]
        return Tableau(len(self.free), self.coef, self.row_lo, self.row_hi,
                       self.lower, self.upper, start=st)

    def int_objective(self, obj: Objective) -> list[int]:
        scale = 1
        for _, a in obj.terms:
            scale = lcm(scale, a.denominator)
        c = [0] * len(self.free)
        for j, a in obj.terms:
            k = self.pos.get(j)
            if k is not None:
                c[k] = int(a * scale)
        return c

    def full_point(self, values: Sequence[Fraction]) -> tuple[Fraction, ...]:
        out = []
        for j in range(self.system.num_vars):
            if j in self.fixed_val:
                out.append(Fraction(self.fixed_val[j]))
            else:
                out.append(Fraction(values[self.pos[j]]))
        return tuple(out)


def _prepare(system: LPSystem) -> Optional[_Reduced]:
    pre = propagate(system)
    if pre.infeasible:
        return None
    red = _Reduced(system, pre)
    return None if red.infeasible else red


def _checked(system: LPSystem, obj: Objective, point, iterations) -> OptResult:
    if not system.is_feasible_point(point):
        raise SimplexError("solver produced a point violating the system")
    return OptResult(OPTIMAL, obj.value(point), point, iterations)


def solve(system: LPSystem, obj: Objective, start: Optional[Sequence] = None) -> OptResult:
    """Exact maximum of ``obj`` over ``system``.

    ``start`` optionally suggests nonbasic starting values (a 0/1 point, say);
    it only affects the pivot path, never the optimum.
    """
    red = _prepare(system)
    if red is None:
        return OptResult(INFEASIBLE)
    if not red.free:
        return _checked(system, obj, red.full_point([]), 0)
    tab = red.tableau(start)
    if not tab.phase1():
        return OptResult(INFEASIBLE, iterations=tab.iterations)
    tab.set_objective(red.int_objective(obj))
    status = tab.optimize()
    if status == UNBOUNDED:
        return OptResult(UNBOUNDED, iterations=tab.iterations)
    return _checked(system, obj, red.full_point(tab.structural_values()), tab.iterations)


def is_feasible(system: LPSystem) -> bool:
    red = _prepare(system)
    if red is None:
        return False
    if not red.free:
        return system.is_feasible_point(red.full_point([]))
    return red.tableau().phase1()


def var_ranges(system: LPSystem, variables: Optional[Iterable[int]] = None
               ) -> dict[int, tuple[Optional[Fraction], Optional[Fraction]]]:
    """``{v: (min v, max v)}`` over the polytope (None marks an unbounded side).

    One presolve and one phase 1 are shared by all the range solves; variables
    pinned by presolve need no solve at all.
    """
    variables = range(system.num_vars) if variables is None else [int(v) for v in variables]
    red = _prepare(system)
    if red is None:
        raise InfeasibleSystem("polytope is empty")
    out = {}
    tab = None
    for v in variables:
        if v in red.fixed_val:
            x = Fraction(red.fixed_val[v])
            out[v] = (x, x)
            continue
        if tab is None:
            tab = red.tableau()
            if not tab.phase1():
                raise InfeasibleSystem("polytope is empty")
        k = red.pos[v]
        ends = []
        for sign in (-1, 1):
            c = [0] * len(red.free)
            c[k] = sign
            tab.set_objective(c)
            status = tab.optimize()
            if status == UNBOUNDED:
                ends.append(None)
            else:
                ends.append(tab.value(k))
        out[v] = (ends[0], ends[1])
    return out


def var_range(system: LPSystem, v) -> tuple[Optional[Fraction], Optional[Fraction]]:
    """(min v, max v) over the polytope via two solves."""
    return var_ranges(system, [int(v)])[int(v)]
