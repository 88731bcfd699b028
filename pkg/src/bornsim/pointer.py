"""Pointer-register measurement schemes.

A small system is coupled to one or two cyclic pointer registers by shift
unitaries that are block-diagonal in an observable's branch decomposition:

    U_A = sum_i P_i (x) Shift_N(i) [(x) 1_M]
    U_B = sum_j R_j (x) 1_N (x) Shift_M(j)

where Shift_K(s)|k> = |k+s mod K> and both pointers start in basis state 0.
After the coupling, pointer position i tags branch i, so reading the pointers
in the computational basis realizes the measurement without any direct
reference to a collapse rule.  The joint statistics reproduce the projection
postulate: p(j|i) equals the Born distribution of the second observable on
the collapsed state P_i psi / ||P_i psi||.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Literal

import numpy as np

from .core import (
    Operator,
    OutcomeDistribution,
    StateVector,
    basis_state,
    tensor,
)
from .errors import InvalidInputError, ZeroProbabilityBranchError
from .measurement import BORN, ZERO_PROB_CUTOFF, project_update, rule_probabilities
from .observables import Observable

TWO_POINTER = "two_pointer"
ONE_POINTER = "one_pointer"
Mode = Literal["two_pointer", "one_pointer"]

# The two scheme variants and the brute-force readout must agree this tightly.
SCHEME_AGREEMENT_TOL = 1e-12


@dataclass(frozen=True)
class PointerSchemeSetup:
    """A small system, two observables, and the pointer register sizes.

    n_pointer1 (>= branch count of obs_a) is the size of the first pointer;
    m_pointer2 likewise for the second pointer and obs_b, and must be None in
    one-pointer mode where the second observable is measured directly.
    """

    small_state: StateVector
    obs_a: Observable
    obs_b: Observable
    n_pointer1: int
    m_pointer2: int | None
    mode: Mode

    def __post_init__(self):
        if self.obs_a.dims != self.small_state.dims:
            raise InvalidInputError(
                f"first observable dims {self.obs_a.dims} != state dims "
                f"{self.small_state.dims}"
            )
        if self.obs_b.dims != self.small_state.dims:
            raise InvalidInputError(
                f"second observable dims {self.obs_b.dims} != state dims "
                f"{self.small_state.dims}"
            )
        if self.mode not in (TWO_POINTER, ONE_POINTER):
            raise InvalidInputError(f"unknown mode {self.mode!r}")
        n = int(self.n_pointer1)
        if n < self.obs_a.branch_count:
            raise InvalidInputError(
                f"pointer-1 size {n} < branch count {self.obs_a.branch_count}"
            )
        object.__setattr__(self, "n_pointer1", n)
        if self.mode == TWO_POINTER:
            if self.m_pointer2 is None:
                raise InvalidInputError("two-pointer mode needs m_pointer2")
            m = int(self.m_pointer2)
            if m < self.obs_b.branch_count:
                raise InvalidInputError(
                    f"pointer-2 size {m} < branch count {self.obs_b.branch_count}"
                )
            object.__setattr__(self, "m_pointer2", m)
        elif self.m_pointer2 is not None:
            raise InvalidInputError("one-pointer mode takes no m_pointer2")


def two_pointer_setup(
    small_state: StateVector,
    obs_a: Observable,
    obs_b: Observable,
    n_pointer1: int | None = None,
    m_pointer2: int | None = None,
) -> PointerSchemeSetup:
    """Two-pointer setup; register sizes default to the branch counts."""
    return PointerSchemeSetup(
        small_state,
        obs_a,
        obs_b,
        obs_a.branch_count if n_pointer1 is None else n_pointer1,
        obs_b.branch_count if m_pointer2 is None else m_pointer2,
        TWO_POINTER,
    )


def one_pointer_setup(
    small_state: StateVector,
    obs_a: Observable,
    obs_b: Observable,
    n_pointer1: int | None = None,
) -> PointerSchemeSetup:
    """One-pointer setup; the second observable is measured directly."""
    return PointerSchemeSetup(
        small_state,
        obs_a,
        obs_b,
        obs_a.branch_count if n_pointer1 is None else n_pointer1,
        None,
        ONE_POINTER,
    )


@dataclass(frozen=True)
class JointDistribution:
    """Joint outcome probabilities p[i, j] over branch-index pairs."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 2:
            raise InvalidInputError(f"joint must be a matrix, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)):
            raise InvalidInputError("joint contains non-finite entries")
        if float(probs.min()) < -1e-12:
            raise InvalidInputError(f"negative joint probability {probs.min()!r}")
        probs = np.clip(probs, 0.0, None)
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-10:
            raise InvalidInputError(f"joint total {total!r} is not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def branch_counts(self) -> tuple[int, int]:
        return self.probs.shape


def _cyclic_shift(size: int, amount: int) -> np.ndarray:
    # Permutation matrix |k> -> |k+amount mod size>.
    s = np.zeros((size, size), dtype=complex)
    cols = np.arange(size)
    s[(cols + amount) % size, cols] = 1.0
    return s


def shift_unitary_a(setup: PointerSchemeSetup) -> Operator:
    """Coupling of the first observable to pointer-1, conditioned shift by i."""
    n = setup.n_pointer1
    blocks = sum(
        np.kron(p.entries, _cyclic_shift(n, i))
        for i, p in enumerate(setup.obs_a.projectors)
    )
    if setup.mode == TWO_POINTER:
        blocks = np.kron(blocks, np.eye(setup.m_pointer2))
        dims = setup.small_state.dims + (n, setup.m_pointer2)
    else:
        dims = setup.small_state.dims + (n,)
    return Operator(dims, blocks)


def shift_unitary_b(setup: PointerSchemeSetup) -> Operator:
    """Coupling of the second observable to pointer-2, conditioned shift by j."""
    if setup.mode != TWO_POINTER:
        raise InvalidInputError("no second pointer register in one-pointer mode")
    n, m = setup.n_pointer1, setup.m_pointer2
    blocks = sum(
        np.kron(np.kron(r.entries, np.eye(n)), _cyclic_shift(m, j))
        for j, r in enumerate(setup.obs_b.projectors)
    )
    return Operator(setup.small_state.dims + (n, m), blocks)


def _joint_from_cells(cells: np.ndarray, residual: float) -> JointDistribution:
    if residual > 1e-10:
        raise InvalidInputError(
            f"probability mass {residual!r} outside the branch-indexed pointer cells"
        )
    return JointDistribution(cells)


def run_two_pointer(setup: PointerSchemeSetup) -> tuple[StateVector, JointDistribution]:
    """Evolve psi0 (x) |0> (x) |0> through U_B U_A and read both pointers.

    Returns the final composite state and the joint distribution over
    (first-observable branch, second-observable branch).
    """
    if setup.mode != TWO_POINTER:
        raise InvalidInputError("setup is not in two-pointer mode")
    n, m = setup.n_pointer1, setup.m_pointer2
    start = tensor([setup.small_state, basis_state(n, 0), basis_state(m, 0)])
    u_a = shift_unitary_a(setup)
    u_b = shift_unitary_b(setup)
    final = StateVector(start.dims, u_b.entries @ (u_a.entries @ start.amps))
    na, nb = setup.obs_a.branch_count, setup.obs_b.branch_count
    mass = np.abs(final.amps.reshape(setup.small_state.dim, n, m)) ** 2
    cells = mass.sum(axis=0)
    joint = _joint_from_cells(cells[:na, :nb], float(cells.sum() - cells[:na, :nb].sum()))
    return final, joint


def run_one_pointer(setup: PointerSchemeSetup) -> tuple[StateVector, JointDistribution]:
    """Evolve psi0 (x) |0> through U_A, then measure obs_b on the system directly.

    The joint cell (i, j) is ||R_j P_i psi0||^2, read off the pointer-tagged
    system blocks of the final state.
    """
    if setup.mode != ONE_POINTER:
        raise InvalidInputError("setup is not in one-pointer mode")
    n = setup.n_pointer1
    start = tensor([setup.small_state, basis_state(n, 0)])
    u_a = shift_unitary_a(setup)
    final = StateVector(start.dims, u_a.entries @ start.amps)
    na, nb = setup.obs_a.branch_count, setup.obs_b.branch_count
    blocks = final.amps.reshape(setup.small_state.dim, n)
    cells = np.zeros((na, nb))
    for i in range(na):
        tagged = blocks[:, i]  # equals P_i psi0 by construction
        for j, r in enumerate(setup.obs_b.projectors):
            cells[i, j] = float(np.linalg.norm(r.entries @ tagged) ** 2)
    residual = float((np.abs(blocks) ** 2).sum() - cells.sum())
    joint = _joint_from_cells(cells, residual)
    return final, joint


def marginal_a(joint: JointDistribution) -> OutcomeDistribution:
    """Distribution of the first observable's branch index."""
    rows = joint.probs.sum(axis=1)
    return OutcomeDistribution(tuple(range(rows.size)), rows)


def conditional_b_given_a(joint: JointDistribution, branch_a: int) -> OutcomeDistribution:
    """Distribution of the second branch index given the first one."""
    na, nb = joint.branch_counts
    if not 0 <= branch_a < na:
        raise InvalidInputError(f"branch {branch_a} out of range for {na} branches")
    row = joint.probs[branch_a]
    p_a = float(row.sum())
    if p_a <= ZERO_PROB_CUTOFF:
        raise ZeroProbabilityBranchError(
            f"first branch {branch_a} has probability {p_a!r}"
        )
    return OutcomeDistribution(tuple(range(nb)), row / p_a)


def projection_equivalence_report(setup: PointerSchemeSetup) -> float:
    """Worst |p(j|i) - Born_j(collapsed state)| over all live branch pairs.

    This is the quantitative check that the pointer readout statistics agree
    with the projection postulate applied to the small system alone.
    """
    if setup.mode == TWO_POINTER:
        joint = run_two_pointer(setup)[1]
    else:
        joint = run_one_pointer(setup)[1]
    marg = marginal_a(joint)
    worst = 0.0
    for i in range(setup.obs_a.branch_count):
        if float(marg.probs[i]) <= ZERO_PROB_CUTOFF:
            continue
        cond = conditional_b_given_a(joint, i)
        collapsed = project_update(setup.small_state, setup.obs_a, i)
        born = rule_probabilities(BORN, collapsed, setup.obs_b)
        worst = max(worst, float(np.max(np.abs(cond.probs - born.probs))))
    return worst


def brute_force_joint(setup: PointerSchemeSetup) -> JointDistribution:
    """Joint distribution by exhaustive enumeration of composite basis outcomes.

    Walks every basis state of the final two-pointer state, computes its Born
    probability, and bins it by the two pointer positions.  Deliberately
    independent of the block-norm readout in run_two_pointer; kept as an
    oracle for cross-checking.
    """
    if setup.mode != TWO_POINTER:
        raise InvalidInputError("brute force readout needs a two-pointer setup")
    n, m = setup.n_pointer1, setup.m_pointer2
    start = tensor([setup.small_state, basis_state(n, 0), basis_state(m, 0)])
    u_a = shift_unitary_a(setup)
    u_b = shift_unitary_b(setup)
    amps = u_b.entries @ (u_a.entries @ start.amps)
    na, nb = setup.obs_a.branch_count, setup.obs_b.branch_count
    shape = (setup.small_state.dim, n, m)
    cells = np.zeros((na, nb))
    residual = 0.0
    for flat_index in range(amps.size):
        prob = float(abs(amps[flat_index]) ** 2)
        _, pos1, pos2 = np.unravel_index(flat_index, shape)
        if pos1 < na and pos2 < nb:
            cells[pos1, pos2] += prob
        else:
            residual += prob
    return _joint_from_cells(cells, residual)
