import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wefkit.lp import kernels


def reference_pivot(T, p, q, D):
    T = [[int(v) for v in row] for row in T]
    tpq = T[p][q]
    m, n = len(T), len(T[0])
    out = [[0] * n for _ in range(m)]
    for i in range(m):
        for j in range(n):
            if i == p:
                out[i][j] = D if j == q else -T[p][j]
            elif j == q:
                out[i][j] = T[i][q]
            else:
                num = tpq * T[i][j] - T[i][q] * T[p][j]
                assert num % D == 0
                out[i][j] = num // D
    if tpq < 0:
        out = [[-v for v in row] for row in out]
    return out, abs(tpq)


@st.composite
def pivot_case(draw):
    m, n = draw(st.integers(1, 5)), draw(st.integers(1, 5))
    T = np.array([[draw(st.integers(-20, 20)) for _ in range(n)] for _ in range(m)], dtype=np.int64)
    nz = [(i, j) for i in range(m) for j in range(n) if T[i, j] != 0]
    if not nz:
        T[0, 0] = 1
        nz = [(0, 0)]
    p, q = draw(st.sampled_from(nz))
    return T, p, q


@given(pivot_case())
def test_jit_and_numpy_agree_with_reference(case):
    T, p, q = case
    want, wd = reference_pivot(T, p, q, 1)
    got_np, status = kernels._pivot_numpy(T, p, q, 1)
    assert status == kernels.OK and got_np.tolist() == want
    out = np.empty_like(T)
    assert kernels._pivot_i64_jit(T, p, q, np.int64(1), out) == kernels.OK
    assert out.tolist() == want
    res, d = kernels.pivot(T, p, q, 1)
    assert res.tolist() == want and d == wd


def test_overflow_promotes_to_object():
    big = 2**40
    T = np.array([[big, big], [big, 1]], dtype=np.int64)
    out, d = kernels.pivot(T, 0, 0, 1)
    assert out.dtype == object
    assert out[1][1] == big * 1 - big * big
    assert d == big


def test_matvec_guard():
    T = np.array([[2**40, 1]], dtype=np.int64)
    x = np.array([2**40, 1], dtype=np.int64)
    assert kernels.matvec(T, x)[0] == 2**80 + 1
    assert kernels.matvec(np.zeros((2, 0), dtype=np.int64), np.zeros(0, dtype=np.int64)).tolist() == [0, 0]


def test_zero_pivot_rejected():
    with pytest.raises(ZeroDivisionError):
        kernels.pivot(np.array([[0]], dtype=np.int64), 0, 0, 1)


@pytest.mark.parametrize("flag, expect", [("1", "numpy"), ("0", "numba")])
def test_env_flag_selects_backend(flag, expect):
    env = dict(os.environ, WEFKIT_NO_NUMBA=flag)
    code = "from wefkit.lp import kernels; print(kernels.backend())"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == expect


def test_fallback_path_solves_the_same():
    code = ("from wefkit.circuit import encode, pm4_circuit\n"
            "from wefkit.driver import decide\n"
            "w = encode(pm4_circuit())\n"
            "print(decide(w, (1,0,0,0,0,1), warm=False).z_star)\n")
    outs = []
    for flag in ("1", "0"):
        env = dict(os.environ, WEFKIT_NO_NUMBA=flag)
        outs.append(subprocess.run([sys.executable, "-c", code], env=env,
                                   capture_output=True, text=True).stdout.strip())
    assert outs == ["5/2", "5/2"]
