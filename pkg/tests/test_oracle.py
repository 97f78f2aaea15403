import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_aco.errors import OracleRefusal
from lattice_aco.objective import BoxDomain, ObjectiveFunction, Sense, builtin
from lattice_aco.oracle import OracleConfig, grid_extrema, tour_length, tsp_brute

F1_THEORY = [0.066832364, 0.262910795, 0.458989227, 0.655067658, 0.851146090]


def test_f1_refined():
    out = grid_extrema(builtin("f1"), Sense.MAXIMIZE, OracleConfig((100001,), 60))
    xs = [e.point[0] for e in out]
    assert xs[-1] == 1.0
    np.testing.assert_allclose(xs[:5], F1_THEORY, atol=1e-8)


def test_constant_has_no_strict_extrema():
    f = ObjectiveFunction(lambda X: np.zeros(X.shape[0]), BoxDomain([0, 0], [1, 1]), "zero")
    assert grid_extrema(f, Sense.MINIMIZE, OracleConfig((11, 11))) == []


def test_f3_has_36_maxima():
    out = grid_extrema(builtin("f3"), Sense.MAXIMIZE, OracleConfig((2001, 2001)))
    assert len(out) == 36
    assert all(-1 < c < 1 for e in out for c in e.point)


def test_resolution_validation():
    with pytest.raises(ValueError):
        OracleConfig((2,))
    with pytest.raises(ValueError):
        grid_extrema(builtin("f3"), Sense.MAXIMIZE, OracleConfig((11,)))


def test_brute_examples():
    square = np.array([[0, 1, 2 ** .5, 1], [1, 0, 1, 2 ** .5], [2 ** .5, 1, 0, 1], [1, 2 ** .5, 1, 0]])
    assert tsp_brute(square)[1] == pytest.approx(4.0)
    tri = np.array([[0, 3, 4], [3, 0, 5], [4, 5, 0]], dtype=float)
    assert tsp_brute(tri)[1] == 12.0
    with pytest.raises(OracleRefusal):
        tsp_brute(np.ones((12, 12)) - np.eye(12))


@given(st.integers(4, 7), st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_brute_is_minimal(n, seed):
    xy = np.random.default_rng(seed).random((n, 2))
    d = np.hypot(*(xy[:, None] - xy[None]).transpose(2, 0, 1))
    tour, length = tsp_brute(d)
    assert sorted(tour) == list(range(n))
    assert length == pytest.approx(tour_length(d, tour))
    best = min(tour_length(d, (0,) + p) for p in itertools.permutations(range(1, n)))
    assert length == pytest.approx(best, rel=1e-12)
