import numpy as np
import pytest

from bornsim import (
    InvalidInputError,
    InvalidProjectorFamilyError,
    NotHermitianError,
    Operator,
    embed_observable,
    observable_from_branches,
    observable_from_matrix,
)
from bornsim.rand import random_observable, random_unitary

SIGMA_Z = np.diag([1.0, -1.0])


def test_sigma_z_branches():
    obs = observable_from_matrix(SIGMA_Z)
    assert obs.branch_count == 2
    assert obs.eigenvalues == (-1.0, 1.0)
    np.testing.assert_allclose(obs.projector(0).entries, np.diag([0, 1]), atol=1e-12)
    np.testing.assert_allclose(obs.projector(1).entries, np.diag([1, 0]), atol=1e-12)
    assert obs.branch_rank(0) == 1
    assert obs.eigenvalue(1) == 1.0


def test_scaled_identity_single_branch():
    obs = observable_from_matrix(2.5 * np.eye(3))
    assert obs.branch_count == 1
    assert obs.eigenvalue(0) == pytest.approx(2.5)
    assert obs.branch_rank(0) == 3
    np.testing.assert_allclose(obs.projector(0).entries, np.eye(3), atol=1e-12)


def test_degeneracy_clustering():
    obs = observable_from_matrix(np.diag([2.0, 2.0 + 1e-13, 5.0]))
    assert obs.branch_count == 2
    assert obs.branch_rank(0) == 2
    assert obs.branch_rank(1) == 1
    assert obs.eigenvalue(0) == pytest.approx(2.0, abs=1e-12)


def test_degeneracy_tol_boundary():
    # Gap above the tolerance stays split, below it merges.
    assert observable_from_matrix(np.diag([0.0, 1e-6])).branch_count == 2
    assert observable_from_matrix(np.diag([0.0, 1e-10])).branch_count == 1
    assert observable_from_matrix(np.diag([0.0, 1e-10]), degeneracy_tol=1e-12).branch_count == 2


def test_reconstruction_and_completeness():
    rng = np.random.default_rng(3)
    for _ in range(50):
        d = int(rng.integers(2, 7))
        herm = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        herm = herm + herm.conj().T
        obs = observable_from_matrix(herm)
        np.testing.assert_allclose(obs.matrix().entries, herm, atol=1e-9)
        assert sum(obs.branch_rank(i) for i in range(obs.branch_count)) == d
        total = sum(p.entries for p in obs.projectors)
        np.testing.assert_allclose(total, np.eye(d), atol=1e-10)


def test_branches_roundtrip(rng):
    obs = random_observable(rng, (5,), degenerate=True)
    again = observable_from_branches(obs.branches(), obs.dims)
    assert again.eigenvalues == obs.eigenvalues
    for i in range(obs.branch_count):
        np.testing.assert_allclose(
            again.projector(i).entries, obs.projector(i).entries, atol=1e-14
        )


def test_branches_sorted_canonically():
    p0 = Operator((2,), np.diag([1.0, 0.0]))
    p1 = Operator((2,), np.diag([0.0, 1.0]))
    obs = observable_from_branches([(3.0, p0), (-1.0, p1)])
    assert obs.eigenvalues == (-1.0, 3.0)
    np.testing.assert_allclose(obs.projector(0).entries, p1.entries)


class TestFamilyRejection:
    def test_incomplete(self):
        p0 = Operator((2,), np.diag([1.0, 0.0]))
        with pytest.raises(InvalidProjectorFamilyError):
            observable_from_branches([(1.0, p0)])

    def test_not_orthogonal(self):
        p0 = Operator((2,), np.diag([1.0, 0.0]))
        full = Operator((2,), np.eye(2))
        with pytest.raises(InvalidProjectorFamilyError):
            observable_from_branches([(1.0, p0), (2.0, full)])

    def test_not_idempotent(self):
        half = Operator((2,), 0.5 * np.eye(2))
        with pytest.raises(InvalidProjectorFamilyError):
            observable_from_branches([(1.0, half), (2.0, half)])

    def test_duplicate_eigenvalues(self):
        p0 = Operator((2,), np.diag([1.0, 0.0]))
        p1 = Operator((2,), np.diag([0.0, 1.0]))
        with pytest.raises(InvalidProjectorFamilyError):
            observable_from_branches([(1.0, p0), (1.0, p1)])

    def test_empty(self):
        with pytest.raises(InvalidProjectorFamilyError):
            observable_from_branches([])


def test_not_hermitian_rejected():
    with pytest.raises(NotHermitianError):
        observable_from_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_branch_accessor_range():
    obs = observable_from_matrix(SIGMA_Z)
    with pytest.raises(InvalidInputError):
        obs.projector(2)
    with pytest.raises(InvalidInputError):
        obs.eigenvalue(-1)


def test_random_observable_unitary_basis(rng):
    u = random_unitary(rng, 5)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(5), atol=1e-12)


def test_embed_observable():
    obs = observable_from_matrix(SIGMA_Z)
    lifted = embed_observable(obs, (3, 2), 1)
    assert lifted.dims == (3, 2)
    assert lifted.eigenvalues == obs.eigenvalues
    expected = np.kron(np.eye(3), np.diag([0.0, 1.0]))
    np.testing.assert_allclose(lifted.projector(0).entries, expected, atol=1e-14)


def test_embed_observable_validation():
    obs = observable_from_matrix(SIGMA_Z)
    with pytest.raises(InvalidInputError):
        embed_observable(obs, (3, 2), 0)  # dim mismatch at slot 0
    with pytest.raises(InvalidInputError):
        embed_observable(obs, (2, 2), 5)
