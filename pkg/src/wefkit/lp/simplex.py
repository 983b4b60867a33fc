"""Bounded primal simplex in exact arithmetic (Bland's rule).

Variables are the structural columns plus one *row variable* ``r_i = a_i.x``
per constraint, bounded by the row's sides, so the system is homogeneous and
every right-hand side lives in a bound.  The condensed (Tucker) tableau keeps
one row per basic variable and one column per nonbasic variable, scaled to
integers over the common denominator ``D``:

    D * x_B[i] = sum_j T[i, j] * x_N[j]

Row ``m`` of ``T`` is the objective being maximized.  Nonbasic variables sit at
a finite bound (or at 0 when free), so with ``L`` the lcm of all bound
denominators every nonbasic value is an integer multiple of ``1/L`` and every
basic value is ``y[i] / (D * L)`` for the integer vector ``y = T @ (L x_N)``.
The ratio test compares exact integer ratios; floats only pre-select the
candidates.  Phase 1 adds one artificial per row whose initial activity
violates its sides.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .system import INFEASIBLE, OPTIMAL, UNBOUNDED

AT_LOWER, AT_UPPER, AT_ZERO = 0, 1, 2


class SimplexError(RuntimeError):
    pass


def _scaled(b, L):
    return None if b is None else int(b * L)


class Tableau:
    """Simplex state over ``n`` structurals and rows ``lo <= A x <= hi``.

    ``coef`` holds integer row coefficients as ``[(j, a), ...]``; bounds are
    ints, Fractions or None.
    """

    def __init__(self, n, coef, row_lo, row_hi, lower, upper, start=None, max_iter=200_000):
        self.n = n
        self.m = len(coef)
        self.max_iter = max_iter
        self.iterations = 0
        m = self.m
        nv = n + m
        lb = [None if b is None else Fraction(b) for b in list(lower) + list(row_lo)]
        ub = [None if b is None else Fraction(b) for b in list(upper) + list(row_hi)]
        L = 1
        for b in lb + ub:
            if b is not None:
                L = lcm(L, b.denominator)
        self.L = L

        val = [Fraction(0)] * n
        state = [AT_LOWER] * nv
        for j in range(n):
            lo, hi = lb[j], ub[j]
            want = None if start is None else start[j]
            if want is not None and hi is not None and want == hi:
                val[j], state[j] = hi, AT_UPPER
            elif lo is not None:
                val[j], state[j] = lo, AT_LOWER
            elif hi is not None:
                val[j], state[j] = hi, AT_UPPER
            else:
                val[j], state[j] = Fraction(0), AT_ZERO

        rows = []
        art_rows = []  # (row i, sigma)
        for i, terms in enumerate(coef):
            dense = [0] * n
            act = Fraction(0)
            for j, a in terms:
                dense[j] = a
                act += a * val[j]
            rows.append(dense)
            if lb[n + i] is not None and act < lb[n + i]:
                art_rows.append((i, 1))
            elif ub[n + i] is not None and act > ub[n + i]:
                art_rows.append((i, -1))

        # columns: structurals, then one column per row that got an artificial
        colvar = list(range(n))
        rowvar = [n + i for i in range(m)]
        nval = [int(v * L) for v in val]
        extra = len(art_rows)
        for r in rows:
            r.extend([0] * extra)
        phase1 = [0] * (n + extra)
        for k, (i, sigma) in enumerate(art_rows):
            # art = sigma * (r_i - a_i.x); row i now expresses art, r_i goes nonbasic
            art = nv + k
            lb.append(Fraction(0))
            ub.append(None)
            state.append(AT_LOWER)
            rowi = rows[i]
            for j in range(n):
                rowi[j] = -sigma * rowi[j]
            rowi[n + k] = sigma
            colvar.append(n + i)
            rowvar[i] = art
            bound = lb[n + i] if sigma == 1 else ub[n + i]
            state[n + i] = AT_LOWER if sigma == 1 else AT_UPPER
            nval.append(int(bound * L))
            for j in range(n + extra):
                phase1[j] -= rowi[j]
        self.lb, self.ub, self.state = lb, ub, state
        self.lbs = [_scaled(b, L) for b in lb]
        self.ubs = [_scaled(b, L) for b in ub]
        self.colvar, self.rowvar = colvar, rowvar
        self.arts = list(range(nv, nv + extra))
        self.T = kernels.to_tableau(rows + [[0] * (n + extra), phase1])
        self.D = 1
        self.nval = kernels.to_vector(nval)
        self.basic_row = {v: i for i, v in enumerate(rowvar)}
        self.col_of = {v: c for c, v in enumerate(colvar)}
        self._row_bounds()
        self._refresh()

    # ----------------------------------------------------------------- helpers
    def _row_bounds(self):
        """Per-row arrays of the basic variable's scaled bounds."""
        big = 2**62
        vals = [self.lbs[v] for v in self.rowvar] + [self.ubs[v] for v in self.rowvar]
        dtype = object if any(b is not None and abs(b) >= big // 4 for b in vals) else np.int64
        self.has_lo = np.array([self.lbs[v] is not None for v in self.rowvar], dtype=bool)
        self.has_hi = np.array([self.ubs[v] is not None for v in self.rowvar], dtype=bool)
        self.blo = np.array([self.lbs[v] or 0 for v in self.rowvar], dtype=dtype)
        self.bhi = np.array([self.ubs[v] or 0 for v in self.rowvar], dtype=dtype)

    def _set_row_bounds(self, i, v):
        lo, hi = self.lbs[v], self.ubs[v]
        for arr_name, b in (("blo", lo), ("bhi", hi)):
            arr = getattr(self, arr_name)
            b = b or 0
            if arr.dtype != object and abs(b) >= 2**60:
                arr = arr.astype(object)
                setattr(self, arr_name, arr)
            arr[i] = b
        self.has_lo[i] = lo is not None
        self.has_hi[i] = hi is not None

    def _refresh(self):
        self.y = kernels.matvec(self.T[: self.m], self.nval)

    def _fixed(self, v) -> bool:
        lo, hi = self.lb[v], self.ub[v]
        return lo is not None and hi is not None and lo == hi

    def _entering(self, zrow) -> Optional[tuple[int, int]]:
        """Bland: smallest variable index among improving nonbasic columns."""
        best = None
        for c in np.flatnonzero(zrow != 0):
            v = self.colvar[c]
            if best is not None and v >= best[0]:
                continue
            if self._fixed(v):
                continue
            st = self.state[v]
            if zrow[c] > 0:
                if st == AT_UPPER:
                    continue
                best = (v, c, 1)
            else:
                if st == AT_LOWER:
                    continue
                best = (v, c, -1)
        return None if best is None else (best[1], best[2])

    def _ratio(self, c, direction):
        """Return (leaving row or -1 for a bound flip, hit_upper) or None.

        Candidate steps are ``num / den`` in units of ``1/L``.
        """
        m = self.m
        v_in = self.colvar[c]
        cand = []  # (num, den, var, row, hit_upper)
        lo, hi = self.lbs[v_in], self.ubs[v_in]
        if lo is not None and hi is not None:
            cand.append((hi - lo, 1, v_in, -1, direction > 0))
        if m:
            rate = self.T[:m, c] * direction
            D, y = self.D, self.y
            up = (rate > 0) & self.has_hi
            down = (rate < 0) & self.has_lo
            idx = np.flatnonzero(up | down)
            if len(idx):
                den = np.abs(rate[idx])
                hi_b, lo_b, yi = self.bhi[idx], self.blo[idx], y[idx]
                if not (hi_b.dtype == lo_b.dtype == yi.dtype == den.dtype == np.int64) or (
                        float(D) * float(max(np.abs(hi_b).max(), np.abs(lo_b).max()))
                        + float(np.abs(yi).max()) >= 2.0**62):
                    hi_b, lo_b, yi = (a.astype(object) for a in (hi_b, lo_b, yi))
                    den = den.astype(object)
                num = np.where(up[idx], D * hi_b - yi, yi - D * lo_b)
                f = num.astype(np.float64) / den.astype(np.float64)
                f = np.maximum(f, 0.0)
                fmin = f.min()
                if cand:
                    fmin = min(fmin, float(cand[0][0]))
                keep = f <= fmin * (1 + 1e-9) if fmin > 0 else f == 0
                for k in np.flatnonzero(keep):
                    i = int(idx[k])
                    cand.append((max(int(num[k]), 0), int(den[k]), self.rowvar[i], i,
                                 bool(up[idx][k])))
        if not cand:
            return None
        best = cand[0]
        for cd in cand[1:]:
            lhs, rhs = cd[0] * best[1], best[0] * cd[1]
            if lhs < rhs or (lhs == rhs and cd[2] < best[2]):
                best = cd
        return best[3], best[4]

    def _step(self, c, row, hit_upper):
        v_in = self.colvar[c]
        if row < 0:
            self.state[v_in] = AT_UPPER if hit_upper else AT_LOWER
            self._set_nval(c, self.ubs[v_in] if hit_upper else self.lbs[v_in])
            self._refresh()
            return
        v_out = self.rowvar[row]
        self.T, self.D = kernels.pivot(self.T, row, c, self.D)
        self.rowvar[row] = v_in
        self.colvar[c] = v_out
        del self.basic_row[v_out]
        del self.col_of[v_in]
        self.basic_row[v_in] = row
        self.col_of[v_out] = c
        self.state[v_out] = AT_UPPER if hit_upper else AT_LOWER
        self._set_nval(c, self.ubs[v_out] if hit_upper else self.lbs[v_out])
        self._set_row_bounds(row, v_in)
        self._refresh()

    def _set_nval(self, c, value):
        if self.nval.dtype != object and abs(value) >= 2**60:
            self.nval = self.nval.astype(object)
        self.nval[c] = value

    def _run(self, zidx) -> str:
        while True:
            if self.iterations >= self.max_iter:
                raise SimplexError("iteration limit reached")
            ent = self._entering(self.T[zidx])
            if ent is None:
                return OPTIMAL
            c, direction = ent
            ratio = self._ratio(c, direction)
            if ratio is None:
                return UNBOUNDED
            self.iterations += 1
            self._step(c, *ratio)

    # --------------------------------------------------------------- interface
    def phase1(self) -> bool:
        """Drive artificials to zero; False when the system is infeasible."""
        if not self.arts:
            self.T = self.T[: self.m + 1]
            return True
        status = self._run(self.m + 1)
        if status != OPTIMAL:  # pragma: no cover - phase 1 is bounded above by 0
            raise SimplexError("phase 1 unbounded")
        if any(self.value(a) != 0 for a in self.arts):
            return False
        for a in self.arts:
            self.ub[a] = Fraction(0)
            self.ubs[a] = 0
            if a in self.basic_row:
                self._set_row_bounds(self.basic_row[a], a)
        self.T = self.T[: self.m + 1]
        return True

    def set_objective(self, c_int: Sequence[int]):
        """Load integer structural objective coefficients into the objective row."""
        width = self.T.shape[1]
        D = self.D
        cb = []
        rows = []
        for j, cj in enumerate(c_int):
            if cj and j in self.basic_row:
                cb.append(cj)
                rows.append(self.basic_row[j])
        acc = np.zeros(width, dtype=object)
        if rows:
            acc = np.dot(np.array(cb, dtype=object), self.T[rows].astype(object))
        for j, cj in enumerate(c_int):
            if cj and j in self.col_of:
                acc[self.col_of[j]] += cj * D
        obj = [int(a) for a in acc]
        T = self.T
        if T.dtype != object and any(abs(a) >= 2**62 for a in obj):
            T = T.astype(object)
        T = T.copy()
        T[self.m] = np.array(obj, dtype=T.dtype)
        self.T = T

    def optimize(self) -> str:
        return self._run(self.m)

    def value(self, v: int) -> Fraction:
        row = self.basic_row.get(v)
        if row is not None:
            return Fraction(int(self.y[row]), self.D * self.L)
        return Fraction(int(self.nval[self.col_of[v]]), self.L)

    def structural_values(self) -> list[Fraction]:
        return [self.value(j) for j in range(self.n)]


def solve_reduced(n, coef, row_lo, row_hi, lower, upper, c_int, start=None):
    """Maximize integer objective ``c_int`` over the reduced box-and-rows system.

    Returns (status, values, iterations).
    """
    tab = Tableau(n, coef, row_lo, row_hi, lower, upper, start=start)
    if not tab.phase1():
        return INFEASIBLE, None, tab.iterations
    tab.set_objective(c_int)
    status = tab.optimize()
    if status != OPTIMAL:
        return status, None, tab.iterations
    return OPTIMAL, tab.structural_values(), tab.iterations
