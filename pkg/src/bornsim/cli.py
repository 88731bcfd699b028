"""Command line interface.

    bornsim run <file-or-preset> [--format table|records]
    bornsim verify [--trials N] [--dims-limit D] [--seed S]
    bornsim presets

Exit codes: 0 success, 1 verify property failure, 2 parse/usage error,
3 numerical invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from .core import Operator, von_neumann_entropy
from .errors import BornsimError
from .measurement import (
    BORN,
    ProbabilityRule,
    branch_weights,
    classical_selective,
    ll_channel,
    nonselective_channel,
    rule_probabilities,
    state_preparation_unitaries,
)
from .observables import embed_observable
from .pointer import (
    brute_force_joint,
    one_pointer_setup,
    projection_equivalence_report,
    run_one_pointer,
    run_two_pointer,
    two_pointer_setup,
)
from .presets import (
    OBSERVABLE_PRESET_DESCRIPTIONS,
    SCENARIO_PRESETS,
    STATE_PRESET_DESCRIPTIONS,
    observable_preset,
    state_preset,
    scenario_preset_text,
)
from .rand import random_density, random_observable, random_state, random_unitary
from .scenario import (
    DEFAULT_SEED,
    ScenarioParseError,
    parse_scenario,
    run_scenario,
)
from .signaling import (
    TelepathyScenario,
    bob_distribution_with_alice,
    bob_distribution_without_alice,
    channel_simulation,
    signaling_gap,
    swap_parties,
)


@dataclass
class Check:
    name: str
    detail: str
    passed: bool


def _render_records(records) -> str:
    return "\n".join(f"{k}={v}" for k, v in records)


def _render_table(records) -> str:
    body = records[3:]
    head = dict(records[:3])
    width = max((len(k) for k, _ in body), default=8)
    lines = [
        f"scenario {head['scenario']}  kind={head['kind']}  seed={head['seed']}",
        "-" * max(40, width + 18),
    ]
    lines += [f"{k:<{width}}  {v}" for k, v in body]
    return "\n".join(lines)


def cmd_run(args) -> int:
    name = args.scenario
    if os.path.isfile(name):
        with open(name, "r", encoding="utf-8") as fh:
            text = fh.read()
        source = os.path.splitext(os.path.basename(name))[0]
    elif name in SCENARIO_PRESETS:
        text = scenario_preset_text(name)
        source = name
    else:
        print(f"parse error: no such file or preset: {name}", file=sys.stderr)
        return 2
    try:
        records = run_scenario(parse_scenario(text, source))
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except BornsimError as exc:
        print(
            f"invariant violation [{type(exc).__name__}]: {exc}", file=sys.stderr
        )
        return 3
    if args.format == "records":
        print(_render_records(records))
    else:
        print(_render_table(records))
    return 0


def cmd_presets(args) -> int:
    print("states:")
    for name, desc in STATE_PRESET_DESCRIPTIONS.items():
        print(f"  {name:<18} {desc}")
    print("observables:")
    for name, desc in OBSERVABLE_PRESET_DESCRIPTIONS.items():
        print(f"  {name:<18} {desc}")
    print("scenarios:")
    for name, (desc, _) in SCENARIO_PRESETS.items():
        print(f"  {name:<18} {desc}")
    return 0


# ------------------------------------------------------------ verify batteries

def _check_epr(seed: int) -> Check:
    setup = one_pointer_setup(
        state_preset("minus"), observable_preset("sigma_z"), observable_preset("sigma_z")
    )
    final, _ = run_one_pointer(setup)
    s = 1.0 / np.sqrt(2.0)
    expected = np.array([0.0, s, -s, 0.0], dtype=complex)
    dev = float(np.max(np.abs(final.amps - expected)))
    return Check("epr_reproduction", f"worst={dev:.3g} limit=1e-12", dev < 1e-12)


def _check_pointer(trials: int, dims_limit: int, seed: int) -> list[Check]:
    worst_equiv = worst_pair = worst_oracle = 0.0
    arg_equiv = arg_pair = arg_oracle = 0
    degenerate_count = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, 1, t])
        d = int(rng.integers(2, dims_limit + 1))
        degenerate = d >= 3 and t % 3 == 0
        if degenerate:
            degenerate_count += 1
        obs_a = random_observable(rng, (d,), degenerate=degenerate)
        obs_b = random_observable(rng, (d,), degenerate=degenerate)
        state = random_state(rng, (d,))
        two = two_pointer_setup(state, obs_a, obs_b)
        one = one_pointer_setup(state, obs_a, obs_b)
        _, joint_two = run_two_pointer(two)
        _, joint_one = run_one_pointer(one)
        dev = max(
            projection_equivalence_report(two), projection_equivalence_report(one)
        )
        if dev > worst_equiv:
            worst_equiv, arg_equiv = dev, t
        dev = float(np.max(np.abs(joint_two.probs - joint_one.probs)))
        if dev > worst_pair:
            worst_pair, arg_pair = dev, t
        dev = float(np.max(np.abs(brute_force_joint(two).probs - joint_two.probs)))
        if dev > worst_oracle:
            worst_oracle, arg_oracle = dev, t
    mk = lambda name, worst, arg, limit: Check(
        name,
        f"worst={worst:.3g} limit={limit:g} trials={trials} "
        f"degenerate={degenerate_count} worst_seed=[{seed},1,{arg}]",
        worst < limit,
    )
    return [
        mk("projection_equivalence", worst_equiv, arg_equiv, 1e-10),
        mk("scheme_agreement", worst_pair, arg_pair, 1e-12),
        mk("oracle_agreement", worst_oracle, arg_oracle, 1e-12),
    ]


def _check_no_signaling(trials: int, seed: int) -> Check:
    worst, arg = 0.0, 0
    for t in range(trials):
        rng = np.random.default_rng([seed, 2, t])
        d1 = int(rng.integers(2, 5))
        d2 = int(rng.integers(2, 5))
        scenario = TelepathyScenario(
            random_state(rng, (d1, d2)),
            random_observable(rng, (d1,)),
            random_observable(rng, (d2,)),
            BORN,
        )
        gap = max(signaling_gap(scenario), signaling_gap(swap_parties(scenario)))
        if gap > worst:
            worst, arg = gap, t
    return Check(
        "no_signaling_born",
        f"worst={worst:.3g} limit=1e-12 trials={trials} worst_seed=[{seed},2,{arg}]",
        worst < 1e-12,
    )


def _check_witness(seed: int) -> Check:
    scenario = TelepathyScenario(
        state_preset("asymmetric(0.36)"),
        observable_preset("sigma_z"),
        observable_preset("sigma_z"),
        ProbabilityRule(2.0),
    )
    with_alice = bob_distribution_with_alice(scenario).as_dict()
    without_alice = bob_distribution_without_alice(scenario).as_dict()
    # Branch 1 of sigma_z carries eigenvalue +1, i.e. the |0> component.
    pw = 0.36**2 / (0.36**2 + 0.64**2)
    dev = max(
        abs(with_alice[1] - 0.36),
        abs(with_alice[0] - 0.64),
        abs(without_alice[1] - pw),
        abs(without_alice[0] - (1.0 - pw)),
        abs(signaling_gap(scenario) - (0.36 - pw)),
    )
    rng = np.random.default_rng([seed, 3])
    mc_dev = 0.0
    for bit, analytic in ((1, with_alice), (0, without_alice)):
        mc = channel_simulation(scenario, bit, 100_000, rng).as_dict()
        tv = 0.5 * sum(abs(mc[l] - analytic[l]) for l in analytic)
        mc_dev = max(mc_dev, tv)
    ok = dev < 1e-6 and mc_dev <= 0.01
    return Check(
        "telepathy_witness",
        f"analytic_dev={dev:.3g} limit=1e-06 mc_dev={mc_dev:.3g} mc_limit=0.01",
        ok,
    )


def _check_born_marginals() -> Check:
    state = state_preset("bell_pair")
    dev = 0.0
    for subsystem in (0, 1):
        lifted = embed_observable(observable_preset("sigma_z"), state.dims, subsystem)
        probs = rule_probabilities(BORN, state, lifted).probs
        dev = max(dev, float(np.max(np.abs(probs - 0.5))))
    return Check("born_marginals", f"worst={dev:.3g} limit=1e-12", dev < 1e-12)


def _check_entropy(trials: int, seed: int) -> Check:
    n = max(50, trials // 4)
    worst, arg = -np.inf, 0
    for t in range(n):
        rng = np.random.default_rng([seed, 4, t])
        d = int(rng.integers(2, 9))
        rho = random_density(rng, (d,))
        obs = random_observable(rng, (d,), degenerate=(d >= 3 and t % 2 == 0))
        dephased = nonselective_channel(rho, obs)
        s_in, s_out = von_neumann_entropy(rho), von_neumann_entropy(dephased)
        weights = branch_weights_density(dephased, obs)
        avg = 0.0
        for i, w in enumerate(weights):
            if w <= 1e-10:
                continue
            p, post = classical_selective(dephased, obs, i)
            avg += p * von_neumann_entropy(post)
        dev = max(s_in - s_out, avg - s_out)
        if dev > worst:
            worst, arg = dev, t
    return Check(
        "entropy_monotonicity",
        f"worst={worst:.3g} limit=1e-10 trials={n} worst_seed=[{seed},4,{arg}]",
        worst < 1e-10,
    )


def branch_weights_density(rho, obs) -> np.ndarray:
    """Block weights Tr(P_i rho P_i) of a density matrix, in branch order."""
    return np.array(
        [
            float(np.trace(p.entries @ rho.entries @ p.entries).real)
            for p in obs.projectors
        ]
    )


def _check_ll(trials: int, dims_limit: int, seed: int) -> Check:
    n = max(50, trials // 4)
    worst, arg = 0.0, 0
    for t in range(n):
        rng = np.random.default_rng([seed, 5, t])
        d = int(rng.integers(2, dims_limit + 1))
        state = random_state(rng, (d,))
        obs = random_observable(rng, (d,))
        unitaries = [
            Operator((d,), random_unitary(rng, d)) for _ in range(obs.branch_count)
        ]
        weights = branch_weights(state, obs)
        dev = max(
            abs(rec.probability - weights[rec.branch_index])
            for rec in ll_channel(state, obs, unitaries)
        )
        target = random_state(rng, (d,))
        prepared = ll_channel(
            state, obs, state_preparation_unitaries(state, obs, target)
        )
        dev = max(
            dev,
            max(
                float(np.max(np.abs(rec.post_state.amps - target.amps)))
                for rec in prepared
            ),
        )
        if dev > worst:
            worst, arg = dev, t
    return Check(
        "ll_channel_invariance",
        f"worst={worst:.3g} limit=1e-12 trials={n} worst_seed=[{seed},5,{arg}]",
        worst < 1e-12,
    )


def run_verify(trials: int, dims_limit: int, seed: int, out=print) -> int:
    if trials < 1:
        raise ScenarioParseError(f"--trials must be >= 1, got {trials}")
    if dims_limit < 2:
        raise ScenarioParseError(f"--dims-limit must be >= 2, got {dims_limit}")
    checks = [_check_epr(seed)]
    checks += _check_pointer(trials, dims_limit, seed)
    checks.append(_check_no_signaling(trials, seed))
    checks.append(_check_witness(seed))
    checks.append(_check_born_marginals())
    checks.append(_check_entropy(trials, seed))
    checks.append(_check_ll(trials, dims_limit, seed))
    for c in checks:
        out(f"{c.name:<24} {c.detail}  {'PASS' if c.passed else 'FAIL'}")
    failed = [c for c in checks if not c.passed]
    if failed:
        out(f"verify: {len(failed)} of {len(checks)} properties FAILED")
        return 1
    out(f"verify: all {len(checks)} properties passed")
    return 0


def cmd_verify(args) -> int:
    return run_verify(args.trials, args.dims_limit, args.seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bornsim",
        description="Projective measurement simulator with pointer schemes "
        "and operational no-signaling tests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario file or named preset")
    p_run.add_argument("scenario", help="path to a scenario file, or a preset name")
    p_run.add_argument(
        "--format", choices=("table", "records"), default="table",
        help="output style (records is line-oriented key=value)",
    )
    p_run.set_defaults(func=cmd_run)
    p_verify = sub.add_parser("verify", help="run the randomized property batteries")
    p_verify.add_argument("--trials", type=int, default=200)
    p_verify.add_argument("--dims-limit", type=int, default=6)
    p_verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_verify.set_defaults(func=cmd_verify)
    p_presets = sub.add_parser("presets", help="list named states, observables, scenarios")
    p_presets.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except BornsimError as exc:
        print(f"invariant violation [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
