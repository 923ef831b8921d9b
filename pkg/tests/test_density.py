import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dopwalk.blocks import BlockOperator, StateVector
from dopwalk.density import (
    DensityOperator,
    check_state,
    evolve,
    hs_inner,
    maximally_mixed,
    pure_density,
    pure_evolve,
    purity,
    step,
    trace,
)
from dopwalk.errors import DimensionMismatch, NonUnitCoinVector, NotADensityOperator, PairOutsideBasis
from dopwalk.graph import build_graph, pair_basis
from dopwalk.line_walk import paper_initial_state, paper_walk
from dopwalk.oracle import dense_build, dense_evolve, flatten
from dopwalk.operators import CoinFamily, build_walk_unitary

from instances import (
    dense_to_pair_blocks,
    four_cycle,
    four_cycle_family,
    instances,
    random_density_dense,
    random_family,
)
from paper_values import RHO0, RHO1, RHO2_EXPLICIT

SQRT_HALF = 1 / np.sqrt(2)


@pytest.fixture(scope="module")
def line():
    return paper_walk(4)


@pytest.fixture(scope="module")
def cycle():
    g = four_cycle()
    return build_walk_unitary(g, four_cycle_family(g))


def random_state(rng, walk, rank=None):
    rho = random_density_dense(rng, walk.dim, rank)
    return DensityOperator.from_pair_blocks(
        walk.basis, walk.coin_dim, dense_to_pair_blocks(rho, walk.basis, walk.coin_dim)
    )


def assert_blocks(rho, expected, tol=1e-12):
    for (ket, bra), block in expected.items():
        assert np.abs(rho.block(ket, bra) - block).max() <= tol, (ket, bra)


class TestBlockOperator:
    def test_blocks_are_read_only(self, line):
        block = next(iter(line.u.blocks.values()))
        with pytest.raises(ValueError):
            block[0, 0] = 1.0

    def test_small_blocks_are_dropped(self):
        basis = pair_basis(build_graph([0], [(0, 0)]))
        op = BlockOperator(basis, 1, {(0, 0): [[1e-16]]})
        assert len(op) == 0

    def test_matmul_matches_dense(self, cycle):
        rng = np.random.default_rng(3)
        a = random_state(rng, cycle)
        b = cycle.u
        assert np.abs((a @ b).to_dense() - a.to_dense() @ b.to_dense()).max() < 1e-14

    def test_mismatched_operands(self, line, cycle):
        with pytest.raises(DimensionMismatch):
            line.u @ cycle.u


class TestPureDensity:
    def test_initial_state(self, line):
        rho = pure_density([SQRT_HALF, SQRT_HALF], (0, 1), line.basis)
        assert_blocks(rho, RHO0, 1e-15)
        assert len(rho) == 1

    def test_self_loop(self):
        basis = pair_basis(build_graph([0], [(0, 0)]))
        rho = pure_density([1, 0], (0, 0), basis)
        assert np.array_equal(rho.block((0, 0), (0, 0)), [[1, 0], [0, 0]])

    def test_non_unit(self, line):
        with pytest.raises(NonUnitCoinVector):
            pure_density([1, 1], (0, 1), line.basis)

    def test_outside_basis(self, line):
        with pytest.raises(PairOutsideBasis):
            pure_density([1, 0], (0, 2), line.basis)


class TestStep:
    def test_line_first_step(self, line):
        rho1 = step(line, paper_initial_state(line.basis))
        assert_blocks(rho1, RHO1)
        assert len(rho1) == 4
        assert isinstance(rho1, DensityOperator)

    def test_self_loop_fixed(self):
        g = build_graph([0], [(0, 0)])
        walk = build_walk_unitary(g, CoinFamily(2, {(0, 0): [1, 0]}))
        rho = pure_density([1, 0], (0, 0), walk.basis)
        assert np.array_equal(step(walk, rho).to_dense(), rho.to_dense())

    def test_maximally_mixed(self, cycle):
        rho = maximally_mixed(cycle.basis, cycle.coin_dim)
        out = step(cycle, rho)
        assert np.abs(out.to_dense() - rho.to_dense()).max() < 1e-15
        assert abs(trace(out) - 1) < 1e-15

    def test_dimension_mismatch(self, line, cycle):
        with pytest.raises(DimensionMismatch):
            step(line, maximally_mixed(cycle.basis, 2))

    def test_linearity(self, cycle):
        rng = np.random.default_rng(11)
        rho, sigma = random_state(rng, cycle), random_state(rng, cycle)
        alpha, beta = 0.7, -2.3
        lhs = step(cycle, alpha * rho + beta * sigma)
        rhs = alpha * step(cycle, rho) + beta * step(cycle, sigma)
        assert (lhs - rhs).max_abs() <= 1e-12


class TestEvolve:
    def test_line_two_steps(self, line):
        traj = evolve(line, paper_initial_state(line.basis), 2)
        assert len(traj) == 3 and traj.step_count == 2
        assert_blocks(traj[2], RHO2_EXPLICIT)

    def test_zero_steps(self, line):
        rho0 = paper_initial_state(line.basis)
        traj = evolve(line, rho0, 0)
        assert traj.states == (rho0,)

    def test_keep_final_only(self, line):
        traj = evolve(line, paper_initial_state(line.basis), 2, keep_all=False)
        assert traj.times == (2,)
        assert_blocks(traj.final, RHO2_EXPLICIT)

    def test_four_cycle_against_dense(self, cycle):
        rng = np.random.default_rng(5)
        g = four_cycle()
        f = random_family(rng, g, 2)
        walk = build_walk_unitary(g, f)
        rho0 = random_state(rng, walk)
        dense = dense_build(g, f)
        expected = dense_evolve(dense.u, flatten(rho0), 5)
        assert np.abs(flatten(evolve(walk, rho0, 5).final) - expected).max() <= 1e-10

    def test_rejects_non_unit_trace(self, cycle):
        rho = 2.0 * maximally_mixed(cycle.basis, 2)
        with pytest.raises(NotADensityOperator):
            evolve(cycle, rho, 1)
        assert abs(trace(evolve(cycle, rho, 1, check_trace=False).final) - 2) < 1e-12

    def test_negative_steps(self, cycle):
        with pytest.raises(ValueError):
            evolve(cycle, maximally_mixed(cycle.basis, 2), -1)


class TestPureEvolve:
    def test_line_matches_first_state(self, line):
        v = StateVector.from_pairs(line.basis, 2, {(0, 1): [SQRT_HALF, SQRT_HALF]})
        assert_blocks(pure_evolve(line, v, 1).outer(), RHO1)

    def test_zero_steps(self, line):
        v = StateVector.from_pairs(line.basis, 2, {(0, 1): [1, 0]})
        assert np.array_equal(pure_evolve(line, v, 0).amplitudes, v.amplitudes)

    def test_requires_unit_norm(self, line):
        v = StateVector.from_pairs(line.basis, 2, {(0, 1): [1, 1]})
        with pytest.raises(NonUnitCoinVector):
            pure_evolve(line, v, 1)

    @settings(max_examples=25, deadline=None)
    @given(instances(), st.integers(0, 2**32 - 1))
    def test_norm_preserved(self, inst, seed):
        g, f = inst
        walk = build_walk_unitary(g, f)
        rng = np.random.default_rng(seed)
        amps = rng.normal(size=(len(walk.basis), f.coin_dim)) + 1j * rng.normal(
            size=(len(walk.basis), f.coin_dim)
        )
        v = StateVector(walk.basis, amps / np.linalg.norm(amps))
        for _ in range(50):
            v = walk.u @ v
            assert abs(v.norm() - 1) <= 1e-10


class TestScalars:
    def test_initial_trace_and_purity(self, line):
        rho0 = paper_initial_state(line.basis)
        assert trace(rho0) == 1.0
        assert purity(rho0) == 1.0

    def test_maximally_mixed_purity(self, cycle):
        rho = maximally_mixed(cycle.basis, 2)
        assert abs(purity(rho) - 1 / cycle.dim) < 1e-15

    def test_first_state_is_pure(self, line):
        rho1 = step(line, paper_initial_state(line.basis))
        assert abs(hs_inner(rho1, rho1) - 1) < 1e-12
        assert abs(purity(rho1) - 1) < 1e-12

    def test_hs_inner_is_conjugate_linear_in_first_argument(self, cycle):
        rng = np.random.default_rng(2)
        a, b = random_state(rng, cycle), random_state(rng, cycle)
        z = 0.3 - 1.7j
        assert abs(hs_inner(z * a, b) - np.conj(z) * hs_inner(a, b)) < 1e-12
        assert abs(hs_inner(a, z * b) - z * hs_inner(a, b)) < 1e-12
        dense = np.trace(a.to_dense().conj().T @ b.to_dense())
        assert abs(hs_inner(a, b) - dense) < 1e-12


class TestCheckState:
    def test_second_line_state(self, line):
        rho2 = evolve(line, paper_initial_state(line.basis), 2).final
        diag = check_state(rho2)
        assert diag.hermiticity_residual <= 1e-12
        assert diag.trace_residual <= 1e-12
        assert diag.min_eigenvalue >= -1e-12
        assert diag.ok()

    def test_corrupted_block(self, line):
        rho = paper_initial_state(line.basis)
        bad = DensityOperator.from_pair_blocks(
            line.basis, 2, {((0, 1), (0, 1)): [[0.5, 0.5], [0.1, 0.5]]}
        )
        assert check_state(bad).hermiticity_residual > 1e-10
        assert not check_state(bad).ok()
        assert check_state(rho).ok()

    def test_zero_operator(self, line):
        diag = check_state(DensityOperator.zeros(line.basis, 2))
        assert diag.trace_residual == 1.0

    def test_negative_eigenvalue(self, line):
        bad = DensityOperator.from_pair_blocks(line.basis, 2, {((0, 1), (0, 1)): [[1.5, 0], [0, -0.5]]})
        assert check_state(bad).min_eigenvalue == pytest.approx(-0.5)


@settings(max_examples=30, deadline=None)
@given(instances(max_vertices=5), st.integers(0, 2**32 - 1))
def test_channel_invariants(inst, seed):
    g, f = inst
    walk = build_walk_unitary(g, f)
    rng = np.random.default_rng(seed)
    rho = random_state(rng, walk, rank=int(rng.integers(1, 4)))
    pur0 = purity(rho)
    for _ in range(50):
        nxt = step(walk, rho)
        assert abs(trace(nxt) - trace(rho)) <= 1e-12
        rho = nxt
        assert check_state(rho).hermiticity_residual <= 1e-10
        assert abs(purity(rho) - pur0) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(instances(max_vertices=5), st.integers(0, 2**32 - 1))
def test_pure_state_consistency(inst, seed):
    g, f = inst
    walk = build_walk_unitary(g, f)
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=(len(walk.basis), f.coin_dim)) + 1j * rng.normal(
        size=(len(walk.basis), f.coin_dim)
    )
    v = StateVector(walk.basis, amps / np.linalg.norm(amps))
    traj = evolve(walk, v.outer(DensityOperator), 10)
    for t, rho in enumerate(traj):
        assert (rho - pure_evolve(walk, v, t).outer()).max_abs() <= 1e-10
