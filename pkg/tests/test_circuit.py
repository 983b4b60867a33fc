import itertools

import pytest
from hypothesis import given, strategies as st

from oracles import AND_TABLE, OR_TABLE, nx_has_pm
from wefkit.circuit import (AND, OR, Circuit, CircuitError, Gate, const, encode, evaluate,
                            format_circuit, gate, inp, parse_circuit, pm4_circuit,
                            pm4_circuit_padded)
from wefkit.lp import fix_vars, var_ranges


def single(kind, a=None, b=None):
    return Circuit(2, (Gate(kind, (a or inp(0), b or inp(1)), "y"),))


def unique_extension(wef, x):
    ranges = var_ranges(fix_vars(wef.lp, dict(zip(wef.x_vars, x))))
    assert all(lo == hi for lo, hi in ranges.values())
    return [ranges[j][0] for j in range(wef.lp.num_vars)]


@pytest.mark.parametrize("kind, table", [(AND, AND_TABLE), (OR, OR_TABLE)])
def test_gate_truth_tables(kind, table):
    wef = encode(single(kind))
    assert wef.lp.num_constraints == 4 and wef.lp.num_vars == 3
    for x, want in table.items():
        assert unique_extension(wef, x) == [x[0], x[1], want]


def test_or_with_negated_input_forced_to_one():
    wef = encode(Circuit(1, (Gate(OR, (~inp(0), inp(0)), "s"),)))
    assert unique_extension(wef, (0,))[-1] == 1
    wef = encode(Circuit(2, (Gate(OR, (~inp(0), inp(1)), "s"),)))
    assert unique_extension(wef, (0, 0))[-1] == 1
    assert unique_extension(wef, (1, 0))[-1] == 0


def test_pm4_examples():
    c = pm4_circuit()
    assert evaluate(c, (1, 0, 0, 0, 0, 1))[0] == 1
    assert evaluate(c, (0,) * 6)[0] == 0
    assert evaluate(c, (1, 1, 0, 0, 0, 0))[0] == 0
    assert evaluate(c, (1,) * 6)[0] == 1
    for pm in [(1, 0, 0, 0, 0, 1), (0, 1, 0, 0, 1, 0), (0, 0, 1, 1, 0, 0)]:
        w, vals = evaluate(c, pm)
        assert w == 1 and sum(vals[:3]) == 1


def test_pm4_agrees_with_networkx():
    for c in (pm4_circuit(), pm4_circuit_padded()):
        for x in itertools.product((0, 1), repeat=6):
            assert evaluate(c, x)[0] == nx_has_pm(4, x)


def test_counts():
    assert (encode(pm4_circuit()).lp.num_constraints, encode(pm4_circuit()).lp.num_vars) == (20, 11)
    padded = encode(pm4_circuit_padded())
    assert (padded.lp.num_constraints, padded.lp.num_vars) == (28, 13)


def test_eval_length_mismatch():
    with pytest.raises(CircuitError):
        evaluate(pm4_circuit(), (1, 0))


def test_invalid_circuits():
    with pytest.raises(CircuitError):
        Circuit(1, (Gate(AND, (inp(0), gate(0))),))
    with pytest.raises(CircuitError):
        Circuit(1, (Gate(AND, (inp(0), inp(0))), Gate(AND, (gate(1), inp(0)))))
    with pytest.raises(CircuitError):
        Circuit(1, (Gate(AND, (inp(0), inp(3))),))
    with pytest.raises(CircuitError):
        Circuit(1, (Gate("XOR", (inp(0), inp(0))),))
    with pytest.raises(CircuitError):
        Circuit(1, ())


def test_output_gate_must_feed_nothing():
    with pytest.raises(CircuitError):
        parse_circuit("INPUTS 1 a\ny = a & a\nw = y | a\nz = w & a\nOUTPUT w\n")


def test_text_roundtrip_and_errors():
    for c in (pm4_circuit(), pm4_circuit_padded()):
        back = parse_circuit(format_circuit(c))
        for x in itertools.product((0, 1), repeat=6):
            assert evaluate(back, x) == evaluate(c, x)
    c = parse_circuit("# demo\nINPUTS 2 a b\ny = !a OR 1\nw = y AND b\nOUTPUT w\n")
    assert evaluate(c, (1, 1))[0] == 1
    for bad in ["INPUTS 2 a b\nw = a & c\nOUTPUT w\n",
                "INPUTS 2 a b\nw = a & b & a\nOUTPUT w\n",
                "y = a & b\n",
                "INPUTS 2 a b\nw = a & b\n"]:
        with pytest.raises(CircuitError):
            parse_circuit(bad)


# --------------------------------------------------------------- properties
@st.composite
def circuits(draw):
    q = draw(st.integers(1, 4))
    t = draw(st.integers(1, 6))
    gates = []
    for k in range(t):
        def lit():
            choice = draw(st.integers(0, 2 if k else 1))
            if choice == 0:
                base = inp(draw(st.integers(0, q - 1)))
            elif choice == 1:
                base = const(draw(st.integers(0, 1)))
            else:
                base = gate(draw(st.integers(0, k - 1)))
            return ~base if draw(st.booleans()) else base
        gates.append(Gate(draw(st.sampled_from([AND, OR])), (lit(), lit())))
    return Circuit(q, tuple(gates))


@given(circuits())
def test_counts_and_x01_on_every_prefix(c):
    for k in range(1, c.t + 1):
        pre = c.prefix(k)
        wef = encode(pre)
        assert wef.lp.num_constraints == 4 * k and wef.lp.num_vars == c.q + k
        for x in itertools.product((0, 1), repeat=c.q):
            ext = unique_extension(wef, x)
            w, vals = evaluate(pre, x)
            assert ext == list(x) + list(vals)
            assert ext[wef.w_var] == w
