import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wefkit.matching import (GraphError, facet_matrix, check_facets,
                             check_cross_oracle, check_ep_face, check_odd_set,
                             check_objective, det, double_factorial, edges, graph, has_pm,
                             hypo_matchable_sets, matching_masks, optimize_vertices,
                             pm_vertices, random_objectives, run_all, to_bits, to_mask)

from oracles import nx_has_pm


@pytest.mark.parametrize("n,tight", [(2, 1), (4, 3), (6, 15)])
def test_ep_face_tight_counts(n, tight):
    rep = check_ep_face(n)
    assert rep.ok and rep.data["tight"] == tight == double_factorial(n - 1)


def test_pm_vertex_counts():
    assert len(pm_vertices(2)) == 2
    assert len(pm_vertices(4)) == 64
    assert sum(w for _, w in pm_vertices(4)) == 37


def test_has_pm_matches_networkx():
    for x in itertools.product((0, 1), repeat=6):
        assert has_pm(4, x) == nx_has_pm(4, x)


@given(st.lists(st.integers(0, 1), min_size=15, max_size=15))
def test_has_pm_matches_networkx_n6(x):
    assert has_pm(6, x) == nx_has_pm(6, x)


def test_graph_helpers():
    x = graph(4, ["12", "34"])
    assert x == (1, 0, 0, 0, 0, 1)
    assert to_bits(to_mask(x), 4) == x
    assert to_mask(x) in matching_masks(4)
    with pytest.raises(GraphError):
        graph(4, ["15"])
    with pytest.raises(GraphError):
        check_ep_face(3)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_odd_set_description(n):
    assert check_odd_set(n).ok


@pytest.mark.parametrize("n", [4, 6])
@pytest.mark.parametrize("d", [Fraction(1, 2), Fraction(1, 7)])
def test_random_objective_checks(n, d):
    reps = random_objectives(n, 10 if n == 4 else 3, seed=11, d=d)
    assert all(r.ok for r in reps)


def test_objective_values_by_hand():
    z, arg = optimize_vertices(4, (1, 0, 0, 0, 0, 1))
    assert z == Fraction(5, 2) and len(arg) == 1
    z, arg = optimize_vertices(4, (1, 1, 0, 0, 0, 0))
    assert z == 2 and len(arg) == 1
    rep = check_objective(4, (0,) * 6)
    assert rep.ok and rep.data["z_star"] == 0
    with pytest.raises(GraphError):
        check_objective(4, (0, 1))


def test_hypo_matchable_counts():
    assert len(hypo_matchable_sets(4)) == 8


def test_hypo_matchable_n4_by_networkx():
    # maximal graphs without a perfect matching, found independently
    free = [x for x in itertools.product((0, 1), repeat=6) if not nx_has_pm(4, x)]
    fs = set(free)
    maximal = [x for x in free
               if all(x[k] or x[:k] + (1,) + x[k + 1:] not in fs for k in range(6))]
    assert sorted(to_mask(x) for x in maximal) == sorted(hypo_matchable_sets(4))


@pytest.mark.parametrize("n,size,D,hypo", [(4, 7, -1, 8), (6, 16, 2, 91)])
def test_facet_checks(n, size, D, hypo):
    rep = check_facets(n)
    assert rep.ok
    assert rep.data == {"size": size, "det": D, "hypo": hypo}


@pytest.mark.parametrize("n", [4, 6])
def test_facet_det_against_numpy(n):
    A, _, T = facet_matrix(n)
    assert A == T
    assert round(np.linalg.det(np.array(A, dtype=float))) == det(A)


@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=4, max_size=4))
def test_det_matches_numpy(M):
    assert det(M) == round(np.linalg.det(np.array(M, dtype=float)))


def test_det_edge_cases():
    assert det([]) == 1
    assert det([[0, 1], [1, 0]]) == -1
    assert det([[1, 2], [2, 4]]) == 0
    with pytest.raises(ValueError):
        det([[1, 2]])


def test_cross_oracle():
    assert check_cross_oracle().ok


def test_edges_order():
    assert edges(4) == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))


def test_run_all_n4():
    assert all(r.ok for r in run_all(4, samples=5))
