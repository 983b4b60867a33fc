"""Fraction-free pivot kernels for the simplex tableau.

The tableau holds integers ``T`` and a common positive denominator ``D``
(integer-preserving pivoting, so every division below is exact).  Three
implementations share one contract:

* ``numba``  -- @njit int64 loop with overflow detection (default),
* ``numpy``  -- vectorized int64 with a float magnitude pre-check,
* ``object`` -- numpy object arrays of Python ints, never overflows.

An int64 kernel that would overflow leaves ``T`` untouched and reports it;
the caller then promotes the tableau to the object path.  Set
``WEFKIT_NO_NUMBA=1`` to force the numpy int64 path.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("WEFKIT_NO_NUMBA", "") in ("", "0")

OK, OVERFLOW, INEXACT = 0, 1, 2
_LIMIT = float(2**62)


def numba_jit(f=None, **setting):
    if numba is None:
        return f if f is not None else (lambda g: g)
    if f is None:
        return lambda g: numba.njit(g, **setting)
    return numba.njit(f, **setting)


@numba_jit(cache=True)
def _pivot_i64_jit(T, p, q, D, out):
    m, n = T.shape
    tpq = T[p, q]
    ftpq = abs(float(tpq))
    for i in range(m):
        if i == p:
            continue
        tiq = T[i, q]
        if tiq == 0 and tpq == D:
            for j in range(n):
                out[i, j] = T[i, j]
            continue
        ftiq = abs(float(tiq))
        for j in range(n):
            if j == q:
                out[i, j] = tiq
                continue
            tij = T[i, j]
            tpj = T[p, j]
            if ftpq * abs(float(tij)) >= _LIMIT or ftiq * abs(float(tpj)) >= _LIMIT:
                return OVERFLOW
            num = tpq * tij - tiq * tpj
            if num % D != 0:
                return INEXACT
            out[i, j] = num // D
    for j in range(n):
        out[p, j] = -T[p, j]
    out[p, q] = D
    if tpq < 0:
        for i in range(m):
            for j in range(n):
                out[i, j] = -out[i, j]
    return OK


def _pivot_numpy(T, p, q, D):
    tpq = T[p, q]
    col = T[:, q].copy()
    row = T[p, :].copy()
    if T.dtype != object:
        mag = np.abs(T.astype(np.float64)) * abs(float(tpq)) + np.outer(
            np.abs(col.astype(np.float64)), np.abs(row.astype(np.float64))
        )
        if mag.size and mag.max() >= _LIMIT:
            return None, OVERFLOW
    num = tpq * T - np.outer(col, row)
    if np.any(num % D != 0):
        return None, INEXACT
    out = num // D
    out[:, q] = col
    out[p, :] = -row
    out[p, q] = D
    if tpq < 0:
        out = -out
    return out, OK


def pivot(T: np.ndarray, p: int, q: int, D: int):
    """Exchange basic row ``p`` with nonbasic column ``q``.

    Returns ``(T_new, D_new)``.  ``T`` may come back promoted to object dtype.
    """
    tpq = int(T[p, q])
    if tpq == 0:
        raise ZeroDivisionError("pivot on a zero entry")
    new_d = abs(tpq)
    if T.dtype != object:
        if USE_NUMBA:
            out = np.empty_like(T)
            status = _pivot_i64_jit(T, p, q, np.int64(D), out)
        else:
            out, status = _pivot_numpy(T, p, q, D)
        if status == OK:
            return out, new_d
        if status == INEXACT:
            raise ArithmeticError("inexact fraction-free pivot (tableau corrupted)")
        T = T.astype(object)
    out, status = _pivot_numpy(T, p, q, D)
    if status == INEXACT:
        raise ArithmeticError("inexact fraction-free pivot (tableau corrupted)")
    return out, new_d


def to_tableau(rows, dtype=np.int64) -> np.ndarray:
    """Dense integer array; falls back to object dtype for huge entries."""
    big = any(abs(v) >= 2**62 for r in rows for v in r)
    return np.array(rows, dtype=object if big else dtype)


def to_vector(values) -> np.ndarray:
    big = any(abs(v) >= 2**60 for v in values)
    return np.array(values, dtype=object if big else np.int64)


def matvec(T: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Exact ``T @ x``; int64 when the magnitudes provably fit, else Python ints."""
    if T.dtype != object and x.dtype != object and T.size and x.size:
        bound = float(np.abs(T).max()) * float(np.abs(x).max()) * T.shape[1]
        if bound < _LIMIT:
            return T @ x
    elif T.size == 0 or x.size == 0:
        return np.zeros(T.shape[0], dtype=np.int64)
    return np.dot(T.astype(object), x.astype(object))


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
