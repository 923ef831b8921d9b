import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dopwalk.density import purity
from dopwalk.errors import PairOutsideBasis
from dopwalk.graph import build_graph, line_window, pair_basis
from dopwalk.line_walk import (
    LineWalkConfig,
    paper_coin_family,
    paper_initial_state,
    required_radius,
    run_paper_example,
    second_step_split,
    split_by_position,
)
from dopwalk.operators import validate_coin_family
from dopwalk.oracle import dense_build, dense_evolve, flatten

from paper_values import RHO0, RHO1, RHO1_CROSS, RHO2_EXPLICIT


def test_required_radius():
    assert required_radius(2, 1) == 4
    assert required_radius(0, 0) == 1
    assert LineWalkConfig(3).radius == 5
    with pytest.raises(ValueError):
        LineWalkConfig(-1)


class TestCoinFamily:
    def test_interior_and_boundary(self):
        g = line_window(3)
        f = paper_coin_family(g)
        assert f.coin_dim == 2
        report = validate_coin_family(g, f)
        assert report.ok
        assert report.residuals[0] == 0.0
        edge = g.out_edges[3]
        assert len(edge) == 1
        assert np.linalg.norm(f[edge[0]]) == pytest.approx(1.0, abs=1e-15)

    def test_interior_vectors(self):
        f = paper_coin_family(line_window(2))
        assert np.array_equal(f[(0, 1)], [-0.5j, 0.5])
        assert np.array_equal(f[(0, -1)], [0.5, 0.5])


class TestInitialState:
    def test_matches_display(self):
        rho0 = paper_initial_state(pair_basis(line_window(2)))
        for (ket, bra), block in RHO0.items():
            assert np.array_equal(rho0.block(ket, bra), block)
        assert rho0.trace() == 1.0
        assert purity(rho0) == 1.0

    def test_requires_pair(self):
        with pytest.raises(PairOutsideBasis):
            paper_initial_state(pair_basis(build_graph([0, 2], [(0, 2)])))


def test_distributions_first_steps():
    result = run_paper_example(2)
    d0, d1, d2 = result.distributions
    assert d0[0] == 1.0
    assert d1[-1] == d1[1] == 0.5
    assert d2[-2] == d2[2] == 0.25 and d2[0] == 0.5
    assert sum(d2.probs.values()) == 1.0


def test_third_step_support_from_oracle():
    result = run_paper_example(3)
    d3 = result.distributions[3]
    assert sorted(d3.support()) == [-3, -1, 1, 3]
    walk = result.walk
    dense = dense_build(walk.graph, walk.family)
    rho3 = dense_evolve(dense.u, flatten(paper_initial_state(walk.basis)), 3)
    n = 2
    expected = {}
    for i, (j, _) in enumerate(walk.basis.pairs):
        expected[j] = expected.get(j, 0.0) + np.trace(rho3[i * n:(i + 1) * n, i * n:(i + 1) * n]).real
    for v, p in expected.items():
        assert d3[v] == pytest.approx(p, abs=1e-12)
    assert d3.total() == pytest.approx(1.0, abs=1e-12)


def test_first_state_blocks():
    rho1 = run_paper_example(1).trajectory[1]
    assert len(rho1) == len(RHO1)
    for (ket, bra), block in RHO1.items():
        assert np.abs(rho1.block(ket, bra) - block).max() <= 1e-12


def test_second_state_split():
    result = run_paper_example(2)
    walk, rho1, rho2 = result.walk, result.trajectory[1], result.trajectory[2]
    evaluated, remainder = second_step_split(walk, rho1)
    # the diagonal part of rho_1 produces exactly the eight displayed blocks
    assert len(evaluated) == len(RHO2_EXPLICIT)
    for (ket, bra), block in RHO2_EXPLICIT.items():
        assert np.abs(evaluated.block(ket, bra) - block).max() <= 1e-12
        assert np.abs(rho2.block(ket, bra) - block).max() <= 1e-12
    assert ((evaluated + remainder) - rho2).max_abs() <= 1e-15
    # the remainder is the image of the cross blocks and has no diagonal blocks
    _, cross = split_by_position(rho1)
    assert {(tuple(k), tuple(b)) for k, b, _ in cross.pair_items()} == set(RHO1_CROSS)
    diag, _ = split_by_position(remainder)
    assert diag.max_abs() <= 1e-14
    assert remainder.max_abs() > 0.1


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10))
def test_light_cone(t):
    near = run_paper_example(t, margin=1)
    far = run_paper_example(t, margin=6)
    for rho_near, rho_far in zip(near.trajectory, far.trajectory):
        touched = {v for k, b, _ in rho_far.pair_items() for v in (*k, *b)}
        assert max(abs(v) for v in touched) <= t + 1
        for ket, bra, block in rho_far.pair_items():
            assert np.abs(rho_near.block(ket, bra) - block).max() <= 1e-14
        assert len(rho_near) == len(rho_far)
    for d_near, d_far in zip(near.distributions, far.distributions):
        for v in set(d_near.probs) | set(d_far.probs):
            assert abs(d_near[v] - d_far[v]) <= 1e-12


def test_parity():
    result = run_paper_example(12)
    for t, dist in enumerate(result.distributions):
        for v, p in dist.probs.items():
            if (v - t) % 2:
                assert p == 0.0
        assert dist.total() == pytest.approx(1.0, abs=1e-12)

