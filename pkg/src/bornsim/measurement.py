"""Measurement rules and channels on pure and mixed states.

The outcome probability rules form a one-parameter family acting on the Born
branch weights w_i = ||P_i psi||^2:

    p_i = w_i^q / sum_j w_j^q        (q > 0)

q = 1 is the Born rule.  Any other exponent is an intentionally non-physical
alternative kept around so its operational consequences (signaling) can be
demonstrated.  The family is deterministic on eigenstates for every q and is
defined on pure states; ensembles are handled by weighted mixing of the
per-member distributions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    PSD_TOL,
    DensityMatrix,
    Operator,
    OutcomeDistribution,
    StateVector,
    apply,
)
from .errors import (
    InvalidInputError,
    NotDecoheredError,
    NotUnitaryError,
    ZeroProbabilityBranchError,
)
from .observables import Observable

# Branch weights at or below this are treated as zero when conditioning,
# collapsing, or enumerating surviving branches.
ZERO_PROB_CUTOFF = 1e-12
UNITARY_TOL = 1e-10
DECOHERED_TOL = 1e-8


@dataclass(frozen=True)
class ProbabilityRule:
    """Outcome rule p_i proportional to ||P_i psi||^(2*exponent)."""

    exponent: float = 1.0

    def __post_init__(self):
        q = float(self.exponent)
        if not np.isfinite(q) or q <= 0.0:
            raise InvalidInputError(f"rule exponent must be finite and > 0, got {q!r}")
        object.__setattr__(self, "exponent", q)

    @property
    def is_born(self) -> bool:
        return self.exponent == 1.0


BORN = ProbabilityRule(1.0)


def nonborn_exponent(q: float) -> ProbabilityRule:
    """Alternative rule with branch weights raised to the power q."""
    return ProbabilityRule(q)


@dataclass(frozen=True)
class MeasurementRecord:
    """One selective measurement outcome: which branch, how likely, what remains."""

    branch_index: int
    eigenvalue: float
    probability: float
    post_state: StateVector


def branch_weights(state: StateVector, obs: Observable) -> np.ndarray:
    """Born branch weights ||P_i psi||^2, in branch order."""
    if obs.dims != state.dims:
        raise InvalidInputError(f"dims mismatch {obs.dims} vs {state.dims}")
    w = np.array(
        [float(np.linalg.norm(apply(p, state)) ** 2) for p in obs.projectors]
    )
    return w


def _transform_weights(weights: np.ndarray, rule: ProbabilityRule) -> np.ndarray:
    w = np.clip(weights, 0.0, None)
    if rule.exponent != 1.0:
        w = w**rule.exponent
    total = float(w.sum())
    if total <= 0.0:
        raise InvalidInputError("all branch weights vanish")
    return w / total


def rule_probabilities(
    rule: ProbabilityRule, state: StateVector, obs: Observable
) -> OutcomeDistribution:
    """Outcome distribution over branch indices under the given rule."""
    probs = _transform_weights(branch_weights(state, obs), rule)
    return OutcomeDistribution(tuple(range(obs.branch_count)), probs)


def project_update(state: StateVector, obs: Observable, branch: int) -> StateVector:
    """Collapse onto one branch: P_i psi / ||P_i psi||."""
    vec = apply(obs.projector(branch), state)
    norm = float(np.linalg.norm(vec))
    if norm**2 <= ZERO_PROB_CUTOFF:
        raise ZeroProbabilityBranchError(
            f"branch {branch} has weight {norm**2!r}"
        )
    return StateVector(state.dims, vec / norm)


def measure_selective(
    state: StateVector,
    obs: Observable,
    rule: ProbabilityRule = BORN,
    *,
    rng: np.random.Generator | None = None,
    force_branch: int | None = None,
) -> MeasurementRecord:
    """Sample one outcome and collapse.

    Randomness is caller-owned: pass a seeded numpy Generator, or force a
    specific branch (which must carry nonzero weight).
    """
    dist = rule_probabilities(rule, state, obs)
    if force_branch is not None:
        branch = int(force_branch)
        obs.projector(branch)  # range check
    else:
        if rng is None:
            raise InvalidInputError("either rng or force_branch is required")
        branch = int(rng.choice(obs.branch_count, p=dist.probs / dist.probs.sum()))
    post = project_update(state, obs, branch)
    return MeasurementRecord(
        branch, obs.eigenvalue(branch), float(dist.probs[branch]), post
    )


def ll_channel(
    state: StateVector, obs: Observable, post_unitaries: Sequence[Operator]
) -> list[MeasurementRecord]:
    """Two-stage selective channel: projective collapse, then a per-branch unitary.

    Probabilities are the Born weights and do not depend on the unitaries; the
    record for branch n carries U_n applied to the collapsed state.  Branches
    with zero weight are omitted.
    """
    if len(post_unitaries) != obs.branch_count:
        raise InvalidInputError(
            f"{len(post_unitaries)} unitaries for {obs.branch_count} branches"
        )
    for n, u in enumerate(post_unitaries):
        if u.dims != state.dims:
            raise InvalidInputError(f"unitary {n} dims {u.dims} != {state.dims}")
        if not u.is_unitary(UNITARY_TOL):
            raise NotUnitaryError(f"post-measurement operator {n} is not unitary")
    weights = branch_weights(state, obs)
    records = []
    for n in range(obs.branch_count):
        if weights[n] <= ZERO_PROB_CUTOFF:
            continue
        collapsed = project_update(state, obs, n)
        evolved = StateVector(state.dims, post_unitaries[n].entries @ collapsed.amps)
        records.append(
            MeasurementRecord(n, obs.eigenvalue(n), float(weights[n]), evolved)
        )
    return records


def _orthonormal_completion(v: np.ndarray) -> np.ndarray:
    # Unitary matrix whose first column is exactly v (v must be unit norm).
    d = v.size
    x = np.concatenate([v[:, None], np.eye(d, dtype=complex)], axis=1)
    q = np.linalg.qr(x)[0].copy()
    q[:, 0] = v  # same span as column 0, minus QR's arbitrary phase
    return q


def state_preparation_unitaries(
    state: StateVector, obs: Observable, target: StateVector
) -> list[Operator]:
    """Per-branch unitaries sending every surviving collapsed state to target.

    Feeding these to ll_channel makes the channel output independent of the
    observed branch.  Dead branches get the identity.
    """
    if target.dims != state.dims:
        raise InvalidInputError(f"target dims {target.dims} != {state.dims}")
    weights = branch_weights(state, obs)
    to_target = _orthonormal_completion(target.amps)
    out = []
    for n in range(obs.branch_count):
        if weights[n] <= ZERO_PROB_CUTOFF:
            out.append(Operator(state.dims, np.eye(state.dim)))
            continue
        collapsed = project_update(state, obs, n)
        from_collapsed = _orthonormal_completion(collapsed.amps)
        out.append(Operator(state.dims, to_target @ from_collapsed.conj().T))
    return out


def phase_unitaries(
    obs: Observable, omegas: Sequence[float], dt: float
) -> list[Operator]:
    """Branch unitaries exp(-1j * omega_n * dt) * identity.

    Pure phases: the channel's probabilities are untouched and each branch
    state changes only by a global phase.
    """
    if len(omegas) != obs.branch_count:
        raise InvalidInputError(
            f"{len(omegas)} frequencies for {obs.branch_count} branches"
        )
    eye = np.eye(obs.dim, dtype=complex)
    return [
        Operator(obs.dims, np.exp(-1j * float(w) * float(dt)) * eye) for w in omegas
    ]


def nonselective_channel(rho: DensityMatrix, obs: Observable) -> DensityMatrix:
    """Dephase in the branch decomposition: rho -> sum_i P_i rho P_i."""
    if obs.dims != rho.dims:
        raise InvalidInputError(f"dims mismatch {obs.dims} vs {rho.dims}")
    out = sum(p.entries @ rho.entries @ p.entries for p in obs.projectors)
    return DensityMatrix(rho.dims, out)


def classical_selective(
    rho: DensityMatrix, obs: Observable, branch: int, rule: ProbabilityRule = BORN
) -> tuple[float, DensityMatrix]:
    """Read out one branch of an already-decohered mixed state.

    Requires rho to be block-diagonal in the branch decomposition within
    DECOHERED_TOL.  Returns the rule's probability for the branch and the
    conditional state P_i rho P_i / Tr(P_i rho).
    """
    if obs.dims != rho.dims:
        raise InvalidInputError(f"dims mismatch {obs.dims} vs {rho.dims}")
    obs.projector(branch)  # range check
    blocks = [p.entries @ rho.entries @ p.entries for p in obs.projectors]
    dephased = sum(blocks)
    off = float(np.max(np.abs(rho.entries - dephased)))
    if off > DECOHERED_TOL:
        raise NotDecoheredError(
            f"off-block coherences of size {off!r} exceed {DECOHERED_TOL}"
        )
    weights = np.array([float(np.trace(b).real) for b in blocks])
    if weights[branch] <= PSD_TOL:
        raise ZeroProbabilityBranchError(
            f"branch {branch} has weight {weights[branch]!r}"
        )
    probs = _transform_weights(weights, rule)
    post = DensityMatrix(rho.dims, blocks[branch] / weights[branch])
    return float(probs[branch]), post
