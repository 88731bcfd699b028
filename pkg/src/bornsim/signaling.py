"""Operational signaling test on bipartite entangled states.

Alice holds subsystem 0 and either measures her observable or does nothing;
Bob holds subsystem 1 and measures his observable, assigning outcome
probabilities with a configurable rule.  If Alice measured, the global state
is replaced by the exact proper mixture of her collapsed branches with Born
weights; Bob's statistics are then the weighted mixture over that ensemble.
The signaling gap is the total variation distance between Bob's two arms.
Under the Born rule the gap vanishes identically (no signaling); rules with
any other exponent produce a nonzero gap on suitable entangled states, which
is what makes them operationally inadmissible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import OutcomeDistribution, StateVector, tv_distance
from .errors import InvalidInputError
from .measurement import (
    BORN,
    ZERO_PROB_CUTOFF,
    ProbabilityRule,
    branch_weights,
    project_update,
    rule_probabilities,
)
from .observables import Observable, embed_observable


@dataclass(frozen=True)
class TelepathyScenario:
    """Bipartite state plus the two parties' observables and Bob's rule."""

    state: StateVector
    alice_obs: Observable
    bob_obs: Observable
    bob_rule: ProbabilityRule = BORN

    def __post_init__(self):
        if len(self.state.dims) != 2:
            raise InvalidInputError(
                f"state must have exactly 2 subsystems, got dims {self.state.dims}"
            )
        if self.alice_obs.dims != (self.state.dims[0],):
            raise InvalidInputError(
                f"alice observable dims {self.alice_obs.dims} do not match "
                f"subsystem dim {self.state.dims[0]}"
            )
        if self.bob_obs.dims != (self.state.dims[1],):
            raise InvalidInputError(
                f"bob observable dims {self.bob_obs.dims} do not match "
                f"subsystem dim {self.state.dims[1]}"
            )


@dataclass(frozen=True)
class Ensemble:
    """Proper mixture: (weight, pure state) members with weights summing to 1."""

    members: tuple[tuple[float, StateVector], ...]

    def __post_init__(self):
        members = tuple((float(w), s) for w, s in self.members)
        if not members:
            raise InvalidInputError("ensemble has no members")
        weights = np.array([w for w, _ in members])
        if np.min(weights) < -1e-12:
            raise InvalidInputError(f"negative ensemble weight {weights.min()!r}")
        if abs(float(weights.sum()) - 1.0) > 1e-10:
            raise InvalidInputError(f"ensemble weights sum to {weights.sum()!r}")
        dims = members[0][1].dims
        if any(s.dims != dims for _, s in members):
            raise InvalidInputError("ensemble members have mismatched dims")
        object.__setattr__(self, "members", members)


def _lifted_alice(scenario: TelepathyScenario) -> Observable:
    return embed_observable(scenario.alice_obs, scenario.state.dims, 0)


def _lifted_bob(scenario: TelepathyScenario) -> Observable:
    return embed_observable(scenario.bob_obs, scenario.state.dims, 1)


def swap_parties(scenario: TelepathyScenario) -> TelepathyScenario:
    """Mirror the scenario so the former Bob side becomes the measuring party."""
    d0, d1 = scenario.state.dims
    amps = scenario.state.amps.reshape(d0, d1).T.reshape(-1)
    return TelepathyScenario(
        StateVector((d1, d0), amps),
        scenario.bob_obs,
        scenario.alice_obs,
        scenario.bob_rule,
    )


def alice_measures(scenario: TelepathyScenario) -> Ensemble:
    """Alice's Born measurement as an exact proper mixture of collapsed states.

    Zero-weight branches are omitted; the surviving weights are the Born
    probabilities of her lifted projectors on the global state.
    """
    lifted = _lifted_alice(scenario)
    weights = branch_weights(scenario.state, lifted)
    total = float(weights.sum())
    members = []
    for i, w in enumerate(weights):
        if w <= ZERO_PROB_CUTOFF:
            continue
        members.append((float(w) / total, project_update(scenario.state, lifted, i)))
    return Ensemble(tuple(members))


def bob_distribution_with_alice(scenario: TelepathyScenario) -> OutcomeDistribution:
    """Bob's outcome distribution after Alice has measured (mixture semantics)."""
    lifted = _lifted_bob(scenario)
    ensemble = alice_measures(scenario)
    nb = scenario.bob_obs.branch_count
    mixed = np.zeros(nb)
    for w, member in ensemble.members:
        mixed += w * rule_probabilities(scenario.bob_rule, member, lifted).probs
    return OutcomeDistribution(tuple(range(nb)), mixed)


def bob_distribution_without_alice(scenario: TelepathyScenario) -> OutcomeDistribution:
    """Bob's outcome distribution on the intact global state."""
    return rule_probabilities(scenario.bob_rule, scenario.state, _lifted_bob(scenario))


def signaling_gap(scenario: TelepathyScenario) -> float:
    """Total variation distance between Bob's with-Alice and without-Alice arms."""
    return tv_distance(
        bob_distribution_with_alice(scenario),
        bob_distribution_without_alice(scenario),
    )


def channel_simulation(
    scenario: TelepathyScenario,
    bit: int,
    shots: int,
    rng: np.random.Generator,
) -> OutcomeDistribution:
    """Monte Carlo run of the one-bit channel Alice -> Bob.

    bit 1 means Alice measures before Bob; bit 0 means she does nothing.
    Returns Bob's empirical outcome distribution over shots samples.
    """
    if bit not in (0, 1):
        raise InvalidInputError(f"bit must be 0 or 1, got {bit!r}")
    if shots < 1:
        raise InvalidInputError(f"shots must be >= 1, got {shots!r}")
    nb = scenario.bob_obs.branch_count
    counts = np.zeros(nb, dtype=np.int64)
    if bit == 1:
        lifted = _lifted_bob(scenario)
        ensemble = alice_measures(scenario)
        weights = np.array([w for w, _ in ensemble.members])
        weights = weights / weights.sum()
        per_member = [
            rule_probabilities(scenario.bob_rule, member, lifted).probs
            for _, member in ensemble.members
        ]
        picks = rng.choice(len(weights), size=shots, p=weights)
        for k, probs in enumerate(per_member):
            n_k = int(np.count_nonzero(picks == k))
            if n_k == 0:
                continue
            outcomes = rng.choice(nb, size=n_k, p=probs / probs.sum())
            counts += np.bincount(outcomes, minlength=nb)
    else:
        probs = bob_distribution_without_alice(scenario).probs
        outcomes = rng.choice(nb, size=shots, p=probs / probs.sum())
        counts += np.bincount(outcomes, minlength=nb)
    return OutcomeDistribution(tuple(range(nb)), counts / float(shots))
