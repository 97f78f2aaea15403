import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_aco.expr import parse_objective
from lattice_aco.objective import BoxDomain, ObjectiveFunction, Sense, builtin
from lattice_aco.search import (
    BOTH, ExtremumResult, SearchConfig, dedup, error_ratio, expected_outer_iterations, iter_rounds, search,
)

MAX, MIN = Sense.MAXIMIZE, Sense.MINIMIZE


def res(x, v, sense=MAX):
    return ExtremumResult((x,), v, (1e-3,), False, sense)


def test_dedup_examples():
    tol = [0.01]
    assert len(dedup([res(0.0, 1.0), res(0.03, 1.0)], tol)) == 2
    assert len(dedup([res(0.5, 1.0), res(0.5, 1.0)], tol)) == 1
    (kept,) = dedup([res(0.5, 0.9), res(0.503, 1.0)], tol)
    assert kept.value == 1.0
    (kept,) = dedup([res(0.5, 0.9, MIN), res(0.503, 1.0, MIN)], tol)
    assert kept.value == 0.9


def test_dedup_keeps_senses_apart_and_sorts():
    out = dedup([res(0.7, 1.0), res(0.7, 1.0, MIN), res(0.1, 2.0)], [0.01])
    assert [r.point[0] for r in out] == [0.1, 0.7, 0.7]
    with pytest.raises(ValueError):
        dedup([], [0.0])


def test_error_ratio():
    assert error_ratio(1.0, 0.999999979).value == pytest.approx(2.1e-6, rel=1e-6)
    assert error_ratio(5.0, 5.00002559994310).value == pytest.approx(5.12e-4, rel=1e-3)
    assert error_ratio(3.0, 3.0) == (0.0, False)
    r = error_ratio(0.0, 1e-9)
    assert r.absolute and r.value == 1e-9


def test_expected_outer_iterations():
    assert expected_outer_iterations(0.05, 1e-4, 10) == 3
    assert expected_outer_iterations(8 / 480, 1e-4, 10) == 3
    assert expected_outer_iterations(1e-5, 1e-4, 10) == 0
    assert expected_outer_iterations(1e-3, 1e-4, 10) == 1  # 1e-3/10 lands on epsilon


def test_delta_schedule_and_iteration_count():
    f = builtin("f1")
    cfg = SearchConfig(n=(20,), n1=(10,), epsilon=1e-4)
    rounds = list(iter_rounds(f, cfg, MAX))
    for k, r in enumerate(rounds):
        for g in r.grids:
            assert g.delta[0] == pytest.approx(0.05 / 10 ** k, rel=1e-9)
    rep = search(f, cfg)
    assert rep.outer_iterations == len(rounds) - 1 == expected_outer_iterations(0.05, 1e-4, 10)


def test_search_range_shrinks():
    f = builtin("f5")
    cfg = SearchConfig(n=(95,), n1=(10,), epsilon=1e-4, sense=MIN)
    covered = [sum(float(np.prod(g.region.widths)) for g in r.grids) for r in iter_rounds(f, cfg, MIN)]
    assert all(b <= a + 1e-12 for a, b in zip(covered, covered[1:]))
    assert covered[-1] < covered[0]


def test_constant_function_keeps_every_cell():
    f = ObjectiveFunction(lambda X: np.ones(X.shape[0]), BoxDomain([0], [1]), "one")
    cfg = SearchConfig(n=(4,), n1=(2,), epsilon=0.1)
    rep = search(f, cfg)
    rounds = list(iter_rounds(f, cfg, MAX))
    assert [sum(len(r.occupied(k)) for k in range(len(r.grids))) for r in rounds] == [4, 8, 16]
    assert len(rep.extrema) == 16
    np.testing.assert_allclose(sorted(e.point[0] for e in rep.extrema), (np.arange(16) + 0.5) / 16)


def test_sin_squared_maximum():
    f = parse_objective("sin(x)^2", BoxDomain([0], [3.2]))
    (e,) = search(f, SearchConfig(n=(16,), n1=(10,), epsilon=1e-3, seed=1)).extrema
    assert abs(e.point[0] - math.pi / 2) < 1e-3


def test_two_pass_labels():
    f = parse_objective("sin(x)", BoxDomain([0], [2 * math.pi]))
    rep = search(f, SearchConfig(n=(20,), n1=(10,), epsilon=1e-4, sense=BOTH))
    # The end cells are grid-local extrema too: sin rises away from 0 and falls into 2*pi.
    assert [(e.sense, round(e.point[0], 3)) for e in rep.extrema] == [
        (MIN, 0.0), (MAX, 1.571), (MIN, 4.712), (MAX, 6.283)]


def test_boundary_check_f4():
    rep = search(builtin("f4"), SearchConfig(n=(30,), n1=(10,), sense=MIN, check_boundary=True))
    (b,) = rep.boundary()
    assert b.point == (-5.0,) and b.value == pytest.approx(5.0, abs=1e-12)
    assert len(rep.interior()) == 2


def test_boundary_check_2d_corner():
    f = parse_objective("x1 + x2", BoxDomain([0, 0], [1, 1]))
    rep = search(f, SearchConfig(n=(5, 5), n1=(4, 4), epsilon=0.01, check_boundary=True))
    assert [e.point for e in rep.boundary()] == [(1.0, 1.0)]


def test_workers_do_not_change_results():
    f = builtin("f3")
    base = dict(n=(12, 12), n1=(4, 4), epsilon=1e-2, seed=5)
    a = search(f, SearchConfig(**base))
    b = search(f, SearchConfig(**base, workers=4))
    assert a.extrema == b.extrema and a.inner_steps_total == b.inner_steps_total


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        search(builtin("f3"), SearchConfig(n=(10,), n1=(10,)))


@pytest.mark.parametrize("kw", [dict(n=(0,), n1=(10,)), dict(n=(5,), n1=(1,)), dict(n=(5,), n1=(10,), epsilon=0),
                                dict(n=(5, 5), n1=(10,)), dict(n=(5,), n1=(2,), sense="up")])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SearchConfig(**kw)


@given(st.integers(0, 10 ** 6), st.sampled_from(["f1", "f4", "f5"]))
@settings(max_examples=10, deadline=None)
def test_same_seed_same_report(seed, name):
    f = builtin(name)
    cfg = SearchConfig(n=(30,), n1=(10,), epsilon=1e-3, seed=seed, sense=BOTH, check_boundary=True)
    a, b = search(f, cfg), search(f, cfg)
    assert a.extrema == b.extrema
    assert (a.outer_iterations, a.inner_steps_total, a.evaluations) == (b.outer_iterations, b.inner_steps_total, b.evaluations)


def test_dedup_face_split_tie_merges_across_grids():
    pair = [res(0.4999, 1.0), res(0.5001, 1.0)]
    assert len(dedup(pair, [0.01], groups=[0, 1])) == 1
    assert len(dedup(pair, [0.01], groups=[0, 0])) == 2
    # a plateau spanning two grids keeps every cell
    flat = [res(x, 1.0) for x in (0.1, 0.2, 0.3, 0.4)]
    assert len(dedup(flat, [0.15], groups=[0, 0, 1, 1])) == 4
