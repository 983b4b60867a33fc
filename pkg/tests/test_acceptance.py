"""Acceptance runs, one test per criterion; a summary line per criterion is
printed at the end of the session."""

import itertools
import os
import random
import time
from fractions import Fraction

import pytest

from wefkit.circuit import (AND, OR, Circuit, Gate, encode, evaluate, gate, inp, pm4_circuit,
                            pm4_circuit_padded)
from wefkit.compiler import CompileParams, check_controlled, compile_program, stats_check
from wefkit.driver import (WeightedMatchingFamily, all_inputs, call_bound, decide,
                           max_weight_matching, optimize_binary_search, pmap, q2_example,
                           verify_x01, _decide_job)
from wefkit.lp import fix_vars, var_ranges
from wefkit.matching import facet_matrix, check_ep_face, det, random_objectives
from wefkit.pseudolang import interpret, load
from wefkit.sandwich import (Language, all_languages, check_decisions, check_sandwiched,
                             check_slack, hull_system, membership_circuit, outer_system)

from conftest import PROGRAMS
from oracles import AND_TABLE, OR_TABLE, PM4_YES_COUNT, nx_has_pm, nx_max_weight_pm

WORKERS = os.cpu_count() or 1


@pytest.fixture
def crit(record_property):
    def tag(num, detail=""):
        record_property("criterion", num)
        record_property("detail", detail)
    return tag


def _one_gate(kind, neg=False):
    a = ~inp(0) if neg else inp(0)
    return Circuit(2, (Gate(kind, (a, inp(1))),))


def test_c01_gate_truth_tables(crit):
    crit(1, "AND and OR systems, 8/8 unique integral extensions")
    t0 = time.perf_counter()
    ok = 0
    for kind, table in ((AND, AND_TABLE), (OR, OR_TABLE)):
        wef = encode(_one_gate(kind))
        for x, want in table.items():
            ranges = var_ranges(fix_vars(wef.lp, dict(zip(wef.x_vars, x))))
            assert all(lo == hi and lo in (0, 1) for lo, hi in ranges.values())
            assert ranges[wef.w_var][0] == want
            ok += 1
    assert ok == 8
    assert time.perf_counter() - t0 < 1


def test_c02_circuit_counts(crit):
    crit(2, "4t rows and q+t variables; 7-gate PM4 gives 28 rows in 13 variables")
    t0 = time.perf_counter()
    rng = random.Random(2)
    circuits = [pm4_circuit(), pm4_circuit_padded(), _one_gate(AND), _one_gate(OR, True)]
    for _ in range(20):
        q, gates = rng.randint(1, 5), []
        for g in range(rng.randint(1, 8)):
            pool = [inp(i) for i in range(q)] + [gate(j) for j in range(g)]
            a, b = (lit if rng.random() < 0.7 else ~lit
                    for lit in (rng.choice(pool), rng.choice(pool)))
            gates.append(Gate(rng.choice((AND, OR)), (a, b)))
        circuits.append(Circuit(q, tuple(gates)))
    for c in circuits:
        wef = encode(c)
        assert wef.lp.num_constraints == 4 * len(c.gates)
        assert wef.lp.num_vars == c.q + len(c.gates)
    padded = encode(pm4_circuit_padded())
    assert (padded.lp.num_constraints, padded.lp.num_vars) == (28, 13)
    assert time.perf_counter() - t0 < 1


def test_c03_pm4_x01(crit, pm4_wef):
    crit(3, "PM4 encoding, 64/64 against circuit evaluation and networkx")
    t0 = time.perf_counter()
    c = pm4_circuit()
    assert all(evaluate(c, x)[0] == nx_has_pm(4, x) for x in all_inputs(6))
    rep = verify_x01(pm4_wef, lambda x: evaluate(c, x)[0])
    assert rep.passed == rep.total == 64
    rep = verify_x01(pm4_wef, lambda x: nx_has_pm(4, x))
    assert rep.passed == 64
    assert time.perf_counter() - t0 < 10


def test_c04_decision_semantics(crit, pm4_wef):
    crit(4, f"d = 1/2: z* = m + 1/2 on all {PM4_YES_COUNT} matchable graphs, "
            f"z* < m + 1/2 on the other {64 - PM4_YES_COUNT}")
    t0 = time.perf_counter()
    yes = no = 0
    for x in all_inputs(6):
        v = decide(pm4_wef, x, Fraction(1, 2))
        if nx_has_pm(4, x):
            assert v.z_star == v.m + Fraction(1, 2)
            yes += 1
        else:
            assert v.z_star < v.m + Fraction(1, 2)
            no += 1
    assert (yes, no) == (PM4_YES_COUNT, 64 - PM4_YES_COUNT)
    assert time.perf_counter() - t0 < 30


def test_c05_q2_regime_change(crit):
    crit(5, "1/4 at d = 1/2, 0 (unique) for d < 1/4, 3/2 on the edge objective")
    wef = q2_example()
    assert decide(wef, (0,), Fraction(1, 2)).z_star == Fraction(1, 4)
    for d in (Fraction(1, 5), Fraction(1, 8), Fraction(1, 100), Fraction(249, 1000)):
        v = decide(wef, (0,), d, certify=True)
        assert v.z_star == 0 and v.unique
    assert decide(wef, (1,), Fraction(1, 2)).z_star == Fraction(3, 2)


def test_c06_listing_end_to_end(crit, listing, listing_wef):
    crit(6, "W = 3, p = 13: x-0/1 64/64 against the interpreter, decide 64/64")
    t0 = time.perf_counter()
    rep = verify_x01(listing_wef, _ListingOracle(listing), workers=WORKERS)
    assert rep.passed == rep.total == 64
    verdicts = pmap(_decide_job, [(listing_wef, x, Fraction(1, 2), False)
                                  for x in all_inputs(6)], WORKERS)
    assert [v.answer for v in verdicts] == [nx_has_pm(4, x) for x in all_inputs(6)]
    assert time.perf_counter() - t0 < 600


class _ListingOracle:
    def __init__(self, prog):
        self.prog = prog

    def __call__(self, x):
        return interpret(self.prog, x, 13).w


def test_c07_size_bounds(crit, listing, listing_wef):
    n1 = listing_wef.lp.num_constraints
    crit(7, f"{n1} rows (reported ~3200), K = 64 bound holds, doubling p ok")
    assert 3200 / 4 <= n1 <= 3200 * 4
    rep = stats_check(listing_wef, CompileParams(3, 13), listing)
    assert rep.ok
    wef2 = compile_program(listing, CompileParams(3, 26))
    n2, v1, v2 = wef2.lp.num_constraints, listing_wef.lp.num_vars, wef2.lp.num_vars
    boundary = n1 // 13   # one time step's worth of rows
    assert n2 <= 2 * n1 + boundary and v2 <= 2 * v1 + v1 // 13
    assert stats_check(wef2, CompileParams(3, 26), listing).ok


def test_c08_controlled_templates(crit, listing_wef):
    n, bad = check_controlled(listing_wef)
    crit(8, f"{n - len(bad)}/{n} F/G rows vacuous with their controller at 0")
    assert n > 0 and not bad
    W = listing_wef.stats["W"]
    widest = max(len(r.terms) - 1 for r in listing_wef.lp.constraints if r.tag[0] in "FG")
    assert 2 ** widest <= 2 ** (W + 2)


def test_c09_matching_polytope(crit):
    crit(9, "tight counts 1, 3, 15; 20 random objectives at n = 4; A(4) nonsingular")
    t0 = time.perf_counter()
    assert [check_ep_face(n).data["tight"] for n in (2, 4, 6)] == [1, 3, 15]
    assert all(check_ep_face(n).ok for n in (2, 4, 6))
    reps = random_objectives(4, 20, seed=9)
    assert len(reps) == 20 and all(r.ok for r in reps)
    A, _, _ = facet_matrix(4)
    assert len(A) == 7 and det(A) != 0
    assert time.perf_counter() - t0 < 60


def test_c10_sandwich(crit):
    crit(10, "slack = M for every language with n <= 3 plus 5 random per n; "
             "decisions agree at n = 2")
    d = Fraction(1, 3)
    rng = random.Random(10)
    for n in (1, 2, 3):
        langs = all_languages(n) + [Language.random(n, rng) for _ in range(5)]
        assert all(check_slack(L, d).ok for L in langs)
    and2 = compile_program(load((PROGRAMS / "and2.psc").read_text()), CompileParams(1, 2))
    for L in all_languages(2):
        for P in (hull_system(L), outer_system(L, d), encode(membership_circuit(L))):
            assert check_sandwiched(P, L, d).ok
            assert check_decisions(P, L, d).ok
    L11 = Language.of(2, ["11"])
    assert check_sandwiched(and2, L11, d).ok and check_decisions(and2, L11, d).ok


def test_c11_binary_search(crit):
    fam = WeightedMatchingFamily(4, 3)
    bound = call_bound(0, fam.max_total)
    crit(11, f"20 random K4 weight vectors, at most {bound} decide calls each")
    rng = random.Random(11)
    for _ in range(20):
        w = [rng.randrange(8) for _ in range(6)]
        res = optimize_binary_search(fam, w, (0, fam.max_total))
        assert res.best == max_weight_matching(4, w) == nx_max_weight_pm(4, w)
        assert res.calls <= bound
