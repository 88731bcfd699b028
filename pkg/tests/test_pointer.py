import numpy as np
import pytest

from bornsim import (
    InvalidInputError,
    PointerSchemeSetup,
    StateVector,
    ZeroProbabilityBranchError,
    apply,
    basis_state,
    brute_force_joint,
    conditional_b_given_a,
    marginal_a,
    observable_from_matrix,
    one_pointer_setup,
    partial_trace,
    projection_equivalence_report,
    run_one_pointer,
    run_two_pointer,
    shift_unitary_a,
    shift_unitary_b,
    tensor,
    two_pointer_setup,
)
from bornsim.core import density_from_pure
from bornsim.rand import random_observable, random_state

SIGMA_Z = observable_from_matrix(np.diag([1.0, -1.0]))
SIGMA_X = observable_from_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
SQ2 = 1.0 / np.sqrt(2.0)
PLUS = StateVector((2,), np.array([SQ2, SQ2]))
MINUS = StateVector((2,), np.array([SQ2, -SQ2]))


def _random_pair(rng, d, degenerate=False):
    state = random_state(rng, (d,))
    obs_a = random_observable(rng, (d,), degenerate=degenerate)
    obs_b = random_observable(rng, (d,), degenerate=degenerate)
    return state, obs_a, obs_b


def test_shift_unitary_is_conditional_not():
    # Branch 0 of sigma_z (eigenvalue -1, second basis vector) leaves the
    # pointer alone; branch 1 (eigenvalue +1) shifts it by one: a CNOT
    # controlled on the first basis vector.
    setup = one_pointer_setup(MINUS, SIGMA_Z, SIGMA_Z)
    u = shift_unitary_a(setup)
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    expected = np.kron(np.diag([1.0, 0.0]), x) + np.kron(np.diag([0.0, 1.0]), np.eye(2))
    np.testing.assert_allclose(u.entries, expected, atol=1e-15)


def test_shift_unitaries_are_unitary(rng):
    for _ in range(10):
        d = int(rng.integers(2, 6))
        state, obs_a, obs_b = _random_pair(rng, d, degenerate=(d >= 3))
        setup = two_pointer_setup(state, obs_a, obs_b)
        assert shift_unitary_a(setup).is_unitary(1e-12)
        assert shift_unitary_b(setup).is_unitary(1e-12)


def test_epr_final_state():
    setup = one_pointer_setup(MINUS, SIGMA_Z, SIGMA_Z)
    final, joint = run_one_pointer(setup)
    expected = np.array([0.0, SQ2, -SQ2, 0.0], dtype=complex)
    np.testing.assert_allclose(final.amps, expected, atol=1e-12)
    np.testing.assert_allclose(joint.probs, [[0.5, 0.0], [0.0, 0.5]], atol=1e-12)


def test_single_branch_observable_trivial():
    ident = observable_from_matrix(np.eye(2))
    setup = two_pointer_setup(PLUS, ident, SIGMA_Z)
    u_a = shift_unitary_a(setup)
    np.testing.assert_allclose(u_a.entries, np.eye(4), atol=1e-15)
    _, joint = run_two_pointer(setup)
    np.testing.assert_allclose(joint.probs, [[0.5, 0.5]], atol=1e-14)


def test_plus_state_zx_joint_uniform():
    _, joint = run_two_pointer(two_pointer_setup(PLUS, SIGMA_Z, SIGMA_X))
    np.testing.assert_allclose(joint.probs, 0.25 * np.ones((2, 2)), atol=1e-14)


def test_point_mass_on_eigenstate():
    _, joint = run_two_pointer(two_pointer_setup(basis_state(2, 0), SIGMA_Z, SIGMA_Z))
    np.testing.assert_allclose(joint.probs, [[0.0, 0.0], [0.0, 1.0]], atol=1e-14)


def test_second_coupling_preserves_pointer1_marginal(rng):
    # U_B commutes with the pointer-1 readout, so pointer-1 statistics are
    # fixed once U_A has acted.
    state, obs_a, obs_b = _random_pair(rng, 3, degenerate=True)
    setup = two_pointer_setup(state, obs_a, obs_b)
    n, m = setup.n_pointer1, setup.m_pointer2
    start = tensor([state, basis_state(n, 0), basis_state(m, 0)])
    after_a = apply(shift_unitary_a(setup), start)
    after_b = shift_unitary_b(setup).entries @ after_a
    dims = state.dims + (n, m)
    keep = (len(dims) - 2,)  # the pointer-1 slot
    red_a = partial_trace(density_from_pure(StateVector(dims, after_a)), keep)
    red_b = partial_trace(density_from_pure(StateVector(dims, after_b)), keep)
    np.testing.assert_allclose(
        np.diag(red_a.entries), np.diag(red_b.entries), atol=1e-12
    )


def test_joint_matches_projector_sandwich(rng):
    # Independent route: p(i, j) = <psi| P_i R_j P_i |psi>.
    for _ in range(15):
        d = int(rng.integers(2, 6))
        state, obs_a, obs_b = _random_pair(rng, d, degenerate=(d >= 3))
        _, joint = run_two_pointer(two_pointer_setup(state, obs_a, obs_b))
        for i, p in enumerate(obs_a.projectors):
            for j, r in enumerate(obs_b.projectors):
                sandwich = p.entries @ r.entries @ p.entries
                expected = float(np.vdot(state.amps, sandwich @ state.amps).real)
                assert abs(joint.probs[i, j] - expected) < 1e-12


def test_marginal_is_born_distribution(rng):
    for _ in range(10):
        d = int(rng.integers(2, 6))
        state, obs_a, obs_b = _random_pair(rng, d)
        _, joint = run_one_pointer(one_pointer_setup(state, obs_a, obs_b))
        marg = marginal_a(joint)
        for i, p in enumerate(obs_a.projectors):
            w = float(np.linalg.norm(p.entries @ state.amps) ** 2)
            assert abs(marg.prob_of(i) - w) < 1e-12


def test_schemes_agree(rng):
    for _ in range(15):
        d = int(rng.integers(2, 6))
        state, obs_a, obs_b = _random_pair(rng, d, degenerate=(d >= 3))
        _, joint_two = run_two_pointer(two_pointer_setup(state, obs_a, obs_b))
        _, joint_one = run_one_pointer(one_pointer_setup(state, obs_a, obs_b))
        dev = float(np.max(np.abs(joint_two.probs - joint_one.probs)))
        assert dev < 1e-12


def test_brute_force_oracle_agrees(rng):
    for _ in range(10):
        d = int(rng.integers(2, 5))
        state, obs_a, obs_b = _random_pair(rng, d, degenerate=(d >= 3))
        setup = two_pointer_setup(state, obs_a, obs_b)
        _, joint = run_two_pointer(setup)
        oracle = brute_force_joint(setup)
        assert float(np.max(np.abs(oracle.probs - joint.probs))) < 1e-12


def test_brute_force_needs_two_pointers():
    with pytest.raises(InvalidInputError):
        brute_force_joint(one_pointer_setup(PLUS, SIGMA_Z, SIGMA_X))


def test_projection_equivalence_report(rng):
    for _ in range(10):
        d = int(rng.integers(2, 6))
        state, obs_a, obs_b = _random_pair(rng, d, degenerate=(d >= 3))
        assert projection_equivalence_report(two_pointer_setup(state, obs_a, obs_b)) < 1e-10
        assert projection_equivalence_report(one_pointer_setup(state, obs_a, obs_b)) < 1e-10


def test_oversized_pointer_registers():
    setup = two_pointer_setup(PLUS, SIGMA_Z, SIGMA_X, n_pointer1=4, m_pointer2=5)
    final, joint = run_two_pointer(setup)
    assert final.dims == (2, 4, 5)
    np.testing.assert_allclose(joint.probs, 0.25 * np.ones((2, 2)), atol=1e-14)
    oracle = brute_force_joint(setup)
    np.testing.assert_allclose(oracle.probs, joint.probs, atol=1e-14)


class TestConditionals:
    def test_conditional_rows(self):
        _, joint = run_two_pointer(two_pointer_setup(PLUS, SIGMA_Z, SIGMA_X))
        for i in range(2):
            cond = conditional_b_given_a(joint, i)
            np.testing.assert_allclose(cond.probs, [0.5, 0.5], atol=1e-14)

    def test_dead_row_raises(self):
        _, joint = run_two_pointer(
            two_pointer_setup(basis_state(2, 0), SIGMA_Z, SIGMA_Z)
        )
        with pytest.raises(ZeroProbabilityBranchError):
            conditional_b_given_a(joint, 0)

    def test_out_of_range(self):
        _, joint = run_two_pointer(two_pointer_setup(PLUS, SIGMA_Z, SIGMA_X))
        with pytest.raises(InvalidInputError):
            conditional_b_given_a(joint, 2)


class TestSetupValidation:
    def test_pointer_too_small(self):
        with pytest.raises(InvalidInputError):
            two_pointer_setup(PLUS, SIGMA_Z, SIGMA_X, n_pointer1=1)

    def test_two_pointer_needs_second_register(self):
        with pytest.raises(InvalidInputError):
            PointerSchemeSetup(PLUS, SIGMA_Z, SIGMA_X, 2, None, "two_pointer")

    def test_one_pointer_takes_no_second_register(self):
        with pytest.raises(InvalidInputError):
            PointerSchemeSetup(PLUS, SIGMA_Z, SIGMA_X, 2, 2, "one_pointer")

    def test_unknown_mode(self):
        with pytest.raises(InvalidInputError):
            PointerSchemeSetup(PLUS, SIGMA_Z, SIGMA_X, 2, 2, "three_pointer")

    def test_dims_mismatch(self):
        obs3 = observable_from_matrix(np.diag([1.0, 2.0, 3.0]))
        with pytest.raises(InvalidInputError):
            two_pointer_setup(PLUS, obs3, SIGMA_X)

    def test_mode_mismatch_at_run(self):
        one = one_pointer_setup(PLUS, SIGMA_Z, SIGMA_X)
        two = two_pointer_setup(PLUS, SIGMA_Z, SIGMA_X)
        with pytest.raises(InvalidInputError):
            run_two_pointer(one)
        with pytest.raises(InvalidInputError):
            run_one_pointer(two)

    def test_no_second_shift_in_one_pointer_mode(self):
        with pytest.raises(InvalidInputError):
            shift_unitary_b(one_pointer_setup(PLUS, SIGMA_Z, SIGMA_X))
