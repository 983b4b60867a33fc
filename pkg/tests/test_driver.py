import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from wefkit.circuit import evaluate, pm4_circuit
from wefkit.compiler import CompileParams, compile_program
from wefkit.driver import (DecisionInstance, NonMonotoneFamily, WeightedMatchingFamily,
                           build_objective, call_bound, decide, edges, find_safe_d,
                           int_bits, max_weight_matching, optimize_binary_search,
                           perfect_matchings, q2_example, verify_x01)
from wefkit.lp import solve
from wefkit.pseudolang import load
from wefkit.wef import WEFSystem

from conftest import PROGRAMS
from oracles import PM4_YES_COUNT, nx_has_pm, nx_max_weight_pm, q2_hull_max, scipy_max


@pytest.fixture(scope="module")
def k4():
    return WeightedMatchingFamily(4, 3)


def test_objective_signs(pm4_wef):
    obj = build_objective(pm4_wef, DecisionInstance((1, 0, 0, 1, 1, 0), Fraction(1, 3)))
    coef = dict(obj.terms)
    assert [coef[v] for v in pm4_wef.x_vars] == [1, -1, -1, 1, 1, -1]
    assert coef[pm4_wef.w_var] == Fraction(1, 3)


def test_instance_validation(pm4_wef):
    with pytest.raises(ValueError):
        DecisionInstance((0, 2))
    with pytest.raises(ValueError):
        DecisionInstance((0, 1), d=Fraction(3, 4))
    with pytest.raises(ValueError):
        build_objective(pm4_wef, DecisionInstance((0, 1)))


def test_q2_worked_example():
    wef = q2_example()
    yes = decide(wef, (1,))
    assert yes.answer and yes.z_star == Fraction(3, 2)
    no = decide(wef, (0,), certify=True)
    assert not no.answer and no.z_star == Fraction(1, 4) and no.unique
    small = decide(wef, (0,), d=Fraction(1, 5), certify=True)
    assert small.z_star == 0 and small.unique
    tie = decide(wef, (0,), d=Fraction(1, 4), certify=True)
    assert tie.z_star == 0 and tie.unique is False


@pytest.mark.parametrize("x", [(0,), (1,)])
@pytest.mark.parametrize("d", [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)])
def test_q2_against_vertex_oracle(x, d):
    wef = q2_example()
    c = (1 if x[0] else -1, d, 0)
    assert decide(wef, x, d).z_star == q2_hull_max(c)[0]


def test_q2_safe_d():
    safe = find_safe_d(q2_example())
    assert safe.d == Fraction(1, 8)
    assert safe.eps == {(0,): Fraction(1, 4)}


def test_pm4_safe_d_is_half(pm4_wef):
    safe = find_safe_d(pm4_wef, certify=False)
    assert safe.d == Fraction(1, 2) and safe.rounds == 0
    assert len(safe.eps) == 64 - PM4_YES_COUNT


def test_pm4_decisions_match_networkx(pm4_wef):
    yes = 0
    for x in range(64):
        bits = tuple((x >> (5 - j)) & 1 for j in range(6))
        v = decide(pm4_wef, bits)
        assert v.answer == nx_has_pm(4, bits)
        assert v.answer == (v.z_star == v.m + v.d)
        yes += v.answer
    assert yes == PM4_YES_COUNT


def test_cold_and_warm_agree(pm4_wef):
    for bits in [(0,) * 6, (1,) * 6, (1, 0, 0, 0, 0, 1)]:
        assert decide(pm4_wef, bits).z_star == decide(pm4_wef, bits, warm=False).z_star


def test_lp_value_matches_scipy(pm4_wef):
    obj = build_objective(pm4_wef, DecisionInstance((0, 1, 1, 0, 0, 1)))
    assert float(solve(pm4_wef.lp, obj).z_star) == pytest.approx(scipy_max(pm4_wef.lp, obj), abs=1e-7)


def test_verify_x01_passes_on_circuit(pm4_wef):
    rep = verify_x01(pm4_wef, lambda x: evaluate(pm4_circuit(), x)[0])
    assert rep.ok and rep.total == 64
    assert rep.table()[-1] == "64/64 pass"


def test_verify_x01_catches_dropped_row():
    prog = load((PROGRAMS / "and2.psc").read_text())
    wef = compile_program(prog, CompileParams(1, 2))
    k = next(k for k, r in enumerate(wef.lp.constraints) if r.tag == "G(iv)")
    broken = WEFSystem(wef.lp.without_constraint(k), wef.x_vars, wef.w_var, {})
    rep = verify_x01(broken, lambda x: x[0] & x[1])
    assert not rep.ok
    assert "not unique" in rep.failures[0].problem


def test_verify_x01_catches_wrong_oracle(pm4_wef):
    rep = verify_x01(pm4_wef, lambda x: 1, inputs=[(0,) * 6])
    assert not rep.ok and "oracle says 1" in rep.failures[0].problem


def test_parallel_matches_serial(pm4_wef):
    inputs = [(1, 0, 0, 0, 0, 1), (0, 0, 0, 0, 0, 0), (0, 1, 0, 0, 1, 0)]
    a = verify_x01(pm4_wef, _pm4_oracle, inputs=inputs)
    b = verify_x01(pm4_wef, _pm4_oracle, inputs=inputs, workers=2)
    assert [r.ok for r in a.rows] == [r.ok for r in b.rows]


def _pm4_oracle(x):
    return int(nx_has_pm(4, x))


def test_matchings_enumeration():
    assert len(perfect_matchings(4)) == 3
    assert len(perfect_matchings(6)) == 15
    assert edges(4) == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


def test_call_bound():
    assert call_bound(0, 0) == 1
    assert call_bound(0, 1) == 2
    assert call_bound(0, 14) == 5
    assert call_bound(0, 15) == 5


def test_int_bits():
    assert int_bits(6, 3) == [0, 1, 1]
    with pytest.raises(ValueError):
        int_bits(8, 3)


def test_k4_example(k4):
    res = optimize_binary_search(k4, [3, 1, 1, 1, 1, 3], (0, k4.max_total))
    assert res.best == 6
    assert res.calls <= call_bound(0, k4.max_total)


def test_k4_zero_weights(k4):
    res = optimize_binary_search(k4, [0] * 6, (0, k4.max_total))
    assert res.best == 0


def test_k2():
    fam = WeightedMatchingFamily(2, 3)
    res = optimize_binary_search(fam, [5], (0, fam.max_total), validate=True)
    assert res.best == 5


@settings(max_examples=8)
@given(st.lists(st.integers(0, 7), min_size=6, max_size=6))
def test_k4_binary_search_matches_networkx(weights):
    fam = _K4
    res = optimize_binary_search(fam, weights, (0, fam.max_total))
    assert res.best == nx_max_weight_pm(4, weights) == max_weight_matching(4, weights)
    assert res.calls <= call_bound(0, fam.max_total)


_K4 = WeightedMatchingFamily(4, 3)


def test_non_monotone_family_rejected(pm4_wef):
    # yes exactly at odd k: not a threshold family
    def fam(weights, k):
        return pm4_wef, ((1, 0, 0, 0, 0, 1) if k % 2 else (0,) * 6)
    with pytest.raises(NonMonotoneFamily):
        optimize_binary_search(fam, None, (0, 6), validate=True)


def test_threshold_circuit_agrees_with_brute_force(k4):
    rng = random.Random(5)
    for _ in range(30):
        w = [rng.randrange(8) for _ in range(6)]
        k = rng.randrange(2 ** k4.kbits)
        assert evaluate(k4.circuit, k4.x_bar(w, k))[0] == int(max_weight_matching(4, w) >= k)
