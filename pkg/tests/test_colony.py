import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_aco.colony import Ant, AcoParams, allowed_moves, init_colony, run_to_quiescence, step, transition_probabilities
from lattice_aco.lattice import NeighborScheme, partition
from lattice_aco.objective import BoxDomain, ObjectiveFunction, Sense, builtin


def colony_with_values(values, params=AcoParams(), scheme=NeighborScheme.FULL, history=False):
    """1-D colony whose cell i has oriented value values[i]."""
    values = np.asarray(values, dtype=float)
    n = values.size
    g = partition(BoxDomain([0], [n]), [n])
    f = ObjectiveFunction(lambda X: values[np.floor(X[:, 0]).astype(int)], g.region, "table")
    return init_colony(g, f, Sense.MINIMIZE, params, scheme, history)


def test_init():
    s = init_colony(partition(BoxDomain([0], [1]), [20]), builtin("f1"), Sense.MAXIMIZE, AcoParams())
    assert s.n_ants == 20 and np.all(s.tau == 10.0) and s.t == 0
    assert s.occupancy().tolist() == [1] * 20
    s2 = init_colony(partition(BoxDomain([0, 0], [1, 1]), [2, 2]), builtin("f3"), Sense.MINIMIZE, AcoParams())
    assert s2.n_ants == 4


@pytest.mark.parametrize("values,expected", [
    ([3, 5, 7], {(0,)}),
    ([2, 1, 3], set()),
    ([5, 5], set()),
])
def test_allowed_moves(values, expected):
    s = colony_with_values(values)
    assert allowed_moves(s, Ant(1 if len(values) == 3 else 0, (1,) if len(values) == 3 else (0,))) == expected


def test_transition_split():
    s = colony_with_values([8, 10, 4])
    a = Ant(1, (1,))
    p = transition_probabilities(s, a, allowed_moves(s, a))
    assert p == {(0,): 0.25, (2,): 0.75}


def test_transition_single_and_symmetric():
    s = colony_with_values([8, 10, 11])
    assert transition_probabilities(s, Ant(1, (1,)), {(0,)}) == {(0,): 1.0}
    s = colony_with_values([8, 10, 8])
    assert transition_probabilities(s, Ant(1, (1,)), {(0,), (2,)}) == {(0,): 0.5, (2,): 0.5}


def test_pure_evaporation():
    s = colony_with_values([1, 1, 1, 1])
    moves, s2 = step(s, np.random.default_rng(0))
    assert moves == []
    assert s2.tau.tolist() == [7.0] * 4
    assert s2.positions.tolist() == s.positions.tolist()
    assert s.tau.tolist() == [10.0] * 4  # input untouched


def test_single_deposit():
    s = colony_with_values([5, 3])
    moves, s2 = step(s, np.random.default_rng(0))
    assert moves == [(0, (0,), (1,))]
    assert s2.tau.tolist() == [7.0, 9.0]
    assert s2.n_ants == 2


def test_monotone_sink():
    s = run_to_quiescence(colony_with_values([3, 2, 1]), rng=np.random.default_rng(1))
    assert s.occupancy().tolist() == [0, 0, 3]


def test_two_minima_survive():
    for seed in range(10):
        s = run_to_quiescence(colony_with_values([1, 4, 6, 3, 2, 5, 7]), rng=np.random.default_rng(seed))
        assert set(np.flatnonzero(s.occupancy())) == {0, 4}


def test_constant_is_immediately_quiescent():
    s = run_to_quiescence(colony_with_values([2, 2, 2]), rng=np.random.default_rng(0))
    assert s.t == 1 and s.occupancy().tolist() == [1, 1, 1]


def test_cap_is_reported():
    s = run_to_quiescence(colony_with_values(np.arange(10, 0, -1), AcoParams(max_inner_iters=2)),
                          rng=np.random.default_rng(0))
    assert s.capped and s.t == 2


value_lists = st.lists(st.integers(-5, 5), min_size=2, max_size=25)


@given(value_lists, st.integers(0, 2 ** 32 - 1),
       st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0, 0.95))
@settings(max_examples=200, deadline=None)
def test_colony_invariants(values, seed, alpha, beta, rho):
    p = AcoParams(alpha=alpha, beta=beta, rho=rho)
    s = colony_with_values(values, p, history=True)
    rng = np.random.default_rng(seed)
    for a in s.ants:
        allowed = allowed_moves(s, a)
        if allowed:
            assert abs(sum(transition_probabilities(s, a, allowed).values()) - 1.0) <= 1e-12
    final = run_to_quiescence(s, rng=rng)
    v = s.values
    hist = final.history
    for (pos0, tau0), (pos1, tau1) in zip(hist, hist[1:]):
        assert pos1.size == pos0.size
        moved = pos1 != pos0
        assert np.all(v[pos1[moved]] < v[pos0[moved]])
        assert np.all(tau1 >= 0)
        if not moved.any():
            assert np.array_equal(tau1, (1.0 - rho) * tau0)
    # absorption: occupied cells are grid-local minima
    for c in np.flatnonzero(final.occupancy()):
        nb = [j for j in (c - 1, c + 1) if 0 <= j < len(values)]
        assert all(v[c] <= v[j] for j in nb)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=30, deadline=None)
def test_seed_determinism(seed):
    g = partition(BoxDomain([-1, -1], [1, 1]), [12, 12])
    s = init_colony(g, builtin("f3"), Sense.MAXIMIZE, AcoParams())
    a = run_to_quiescence(s, rng=np.random.default_rng(seed))
    b = run_to_quiescence(s, rng=np.random.default_rng(seed))
    assert np.array_equal(a.positions, b.positions) and np.array_equal(a.tau, b.tau) and a.t == b.t


def test_axis_scheme_2d_can_stop_on_diagonal_slope():
    g = partition(BoxDomain([0, 0], [2, 2]), [2, 2])
    vals = {(0, 0): 0.0, (0, 1): 5.0, (1, 0): 5.0, (1, 1): 1.0}
    f = ObjectiveFunction(lambda X: np.array([vals[(int(x), int(y))] for x, y in X]), g.region, "t")
    full = run_to_quiescence(init_colony(g, f, Sense.MINIMIZE, AcoParams(), NeighborScheme.FULL), rng=0)
    axis = run_to_quiescence(init_colony(g, f, Sense.MINIMIZE, AcoParams(), NeighborScheme.AXIS), rng=0)
    assert {g.cell(i) for i in np.flatnonzero(full.occupancy())} == {(0, 0)}
    assert {g.cell(i) for i in np.flatnonzero(axis.occupancy())} == {(0, 0), (1, 1)}


def test_invalid_params():
    for kw in ({"rho": 1.0}, {"rho": -0.1}, {"tau0": 0}, {"c1": 0}, {"max_inner_iters": 0}):
        with pytest.raises(ValueError):
            AcoParams(**kw)
