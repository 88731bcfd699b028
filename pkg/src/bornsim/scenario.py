"""Flat key/value scenario files and their runners.

Format: one `key = value` pair per line, `#` starts a comment, blank lines
ignored.  Values are whitespace-separated tokens; matrix rows are separated
by `;`.  Complex amplitudes are written as `re+imi` pairs (e.g. `0.5-0.5i`);
bare reals are accepted where a complex number is expected.  Amplitude lists
are normalized after parsing.  Unknown keys are rejected.

Kinds: two_pointer | one_pointer | epr | stern_gerlach | ll_scheme |
telepathy | entropy_demo.  Each runner returns an ordered list of
(key, formatted value) records; formatting is deterministic, so records
output is byte-identical for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Operator,
    StateVector,
    density_from_pure,
    inner,
    von_neumann_entropy,
)
from .errors import InvalidInputError
from .measurement import (
    BORN,
    ZERO_PROB_CUTOFF,
    ProbabilityRule,
    branch_weights,
    classical_selective,
    ll_channel,
    nonselective_channel,
    phase_unitaries,
    project_update,
    state_preparation_unitaries,
)
from .observables import observable_from_branches, observable_from_matrix
from .pointer import (
    brute_force_joint,
    conditional_b_given_a,
    marginal_a,
    one_pointer_setup,
    projection_equivalence_report,
    run_one_pointer,
    run_two_pointer,
    two_pointer_setup,
)
from .presets import observable_preset, state_preset
from .signaling import (
    TelepathyScenario,
    bob_distribution_with_alice,
    bob_distribution_without_alice,
    channel_simulation,
    signaling_gap,
)

DEFAULT_SEED = 1234

KINDS = (
    "two_pointer",
    "one_pointer",
    "epr",
    "stern_gerlach",
    "ll_scheme",
    "telepathy",
    "entropy_demo",
)


class ScenarioParseError(Exception):
    """Scenario text is syntactically or structurally invalid."""


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario: kind, source label, seed, and raw field map."""

    kind: str
    source: str
    seed: int
    fields: dict


def _parse_pairs(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioParseError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        value = value.strip()
        if not key:
            raise ScenarioParseError(f"line {lineno}: empty key")
        if not value:
            raise ScenarioParseError(f"line {lineno}: empty value for '{key}'")
        if key in pairs:
            raise ScenarioParseError(f"line {lineno}: duplicate key '{key}'")
        pairs[key] = value
    return pairs


def _parse_int(value: str, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ScenarioParseError(f"field '{key}': expected an integer, got {value!r}")


def _parse_float(value: str, key: str) -> float:
    try:
        out = float(value)
    except ValueError:
        raise ScenarioParseError(f"field '{key}': expected a number, got {value!r}")
    if not np.isfinite(out):
        raise ScenarioParseError(f"field '{key}': non-finite number {value!r}")
    return out


def _parse_floats(value: str, key: str) -> list[float]:
    return [_parse_float(tok, key) for tok in value.split()]


def _parse_complex(token: str, key: str) -> complex:
    try:
        out = complex(token.replace("i", "j"))
    except ValueError:
        raise ScenarioParseError(
            f"field '{key}': expected a complex number like 0.5-0.5i, got {token!r}"
        )
    if not (np.isfinite(out.real) and np.isfinite(out.imag)):
        raise ScenarioParseError(f"field '{key}': non-finite number {token!r}")
    return out


def _parse_complex_list(value: str, key: str) -> list[complex]:
    return [_parse_complex(tok, key) for tok in value.split()]


def _parse_matrix(value: str, key: str) -> np.ndarray:
    rows = [r.strip() for r in value.split(";")]
    if any(not r for r in rows):
        raise ScenarioParseError(f"field '{key}': empty matrix row")
    parsed = [_parse_complex_list(r, key) for r in rows]
    width = len(parsed[0])
    if any(len(r) != width for r in parsed):
        raise ScenarioParseError(f"field '{key}': ragged matrix rows")
    return np.array(parsed, dtype=complex)


def _take(fields: dict, key: str, default=None) -> str | None:
    return fields.pop(key, default)


def _resolve_state(fields: dict, key: str = "state", default: str | None = None):
    """Resolve a state field to a StateVector; amplitude lists are normalized."""
    value = _take(fields, key, default)
    if value is None:
        raise ScenarioParseError(f"missing required field '{key}'")
    first = value.split()[0]
    if first[0].isalpha():
        try:
            state = state_preset(value)
        except InvalidInputError as exc:
            raise ScenarioParseError(f"field '{key}': {exc}")
        if _take(fields, key + "_dims") is not None:
            raise ScenarioParseError(
                f"field '{key}_dims' not allowed with a preset state"
            )
        return state
    amps = np.array(_parse_complex_list(value, key))
    dims_value = _take(fields, key + "_dims")
    if dims_value is None:
        dims = (amps.size,)
    else:
        dims = tuple(_parse_int(tok, key + "_dims") for tok in dims_value.split())
    if int(np.prod(dims)) != amps.size:
        raise ScenarioParseError(
            f"field '{key}_dims': product {dims} does not match "
            f"{amps.size} amplitudes"
        )
    norm = float(np.linalg.norm(amps))
    if norm <= 0.0:
        raise ScenarioParseError(f"field '{key}': zero state vector")
    return StateVector(dims, amps / norm)


def _resolve_observable(fields: dict, base: str, dims, default: str | None = None):
    """Resolve an observable field: preset name, inline matrix, or branch family."""
    value = _take(fields, base, default)
    if value is None:
        raise ScenarioParseError(f"missing required field '{base}'")
    sub = {k: fields.pop(k) for k in list(fields) if k.startswith(base + ".")}
    if value == "branches":
        eig_key = base + ".eigenvalues"
        if eig_key not in sub:
            raise ScenarioParseError(f"missing required field '{eig_key}'")
        eigenvalues = _parse_floats(sub.pop(eig_key), eig_key)
        branches = []
        for idx, a in enumerate(eigenvalues):
            proj_key = f"{base}.projector.{idx}"
            if proj_key not in sub:
                raise ScenarioParseError(f"missing required field '{proj_key}'")
            branches.append((a, _parse_matrix(sub.pop(proj_key), proj_key)))
        if sub:
            raise ScenarioParseError(f"unknown fields: {', '.join(sorted(sub))}")
        # Family validation happens in the domain layer; violations are
        # invariant errors, not parse errors.
        return observable_from_branches(branches, tuple(dims))
    if sub:
        raise ScenarioParseError(f"unknown fields: {', '.join(sorted(sub))}")
    if value.startswith("matrix"):
        body = value[len("matrix") :].strip()
        if not body:
            raise ScenarioParseError(f"field '{base}': 'matrix' needs entries")
        return observable_from_matrix(_parse_matrix(body, base), dims=tuple(dims))
    try:
        obs = observable_preset(value)
    except InvalidInputError as exc:
        raise ScenarioParseError(f"field '{base}': {exc}")
    if obs.dims != tuple(dims):
        raise ScenarioParseError(
            f"field '{base}': preset dims {obs.dims} do not match {tuple(dims)}"
        )
    return obs


def _reject_unknown(fields: dict) -> None:
    if fields:
        raise ScenarioParseError(f"unknown fields: {', '.join(sorted(fields))}")


def parse_scenario(text: str, source: str) -> Scenario:
    fields = _parse_pairs(text)
    kind = _take(fields, "kind")
    if kind is None:
        raise ScenarioParseError("missing required field 'kind'")
    if kind not in KINDS:
        raise ScenarioParseError(
            f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}"
        )
    seed_value = _take(fields, "seed")
    seed = DEFAULT_SEED if seed_value is None else _parse_int(seed_value, "seed")
    return Scenario(kind, source, seed, fields)


# ---------------------------------------------------------------- formatting

def fmt_real(x: float) -> str:
    out = f"{float(x):.12g}"
    return "0" if out == "-0" else out


def fmt_complex(z: complex) -> str:
    re = 0.0 if z.real == 0 else z.real
    im = 0.0 if z.imag == 0 else z.imag
    return f"{re:.12g}{im:+.12g}i"


Records = list[tuple[str, str]]


def _state_records(prefix: str, state: StateVector) -> Records:
    return [(f"{prefix}.{k}", fmt_complex(z)) for k, z in enumerate(state.amps)]


def _distribution_records(prefix: str, labels, probs) -> Records:
    return [(f"{prefix}.{l}", fmt_real(p)) for l, p in zip(labels, probs)]


# ------------------------------------------------------------------- runners

def _run_pointer(scn: Scenario) -> Records:
    fields = dict(scn.fields)
    if scn.kind == "epr":
        state = state_preset("minus")
        obs_a = observable_preset("sigma_z")
        obs_b = _resolve_observable(fields, "obs_b", state.dims, default="sigma_z")
        mode = "one_pointer"
        n1 = obs_a.branch_count
        m2 = None
    else:
        state = _resolve_state(fields)
        obs_a = _resolve_observable(fields, "obs_a", state.dims)
        obs_b = _resolve_observable(fields, "obs_b", state.dims)
        mode = scn.kind
        n1_value = _take(fields, "pointer1_size")
        n1 = (
            obs_a.branch_count
            if n1_value is None
            else _parse_int(n1_value, "pointer1_size")
        )
        m2 = None
        if scn.kind == "two_pointer":
            m2_value = _take(fields, "pointer2_size")
            m2 = (
                obs_b.branch_count
                if m2_value is None
                else _parse_int(m2_value, "pointer2_size")
            )
    _reject_unknown(fields)

    if mode == "two_pointer":
        setup = two_pointer_setup(state, obs_a, obs_b, n1, m2)
        final, joint = run_two_pointer(setup)
        oracle = brute_force_joint(setup)
        cross_dev = float(np.max(np.abs(joint.probs - oracle.probs)))
        cross_key = "oracle_joint_max_dev"
    else:
        setup = one_pointer_setup(state, obs_a, obs_b, n1)
        final, joint = run_one_pointer(setup)
        twin = two_pointer_setup(state, obs_a, obs_b)
        cross_dev = float(np.max(np.abs(joint.probs - run_two_pointer(twin)[1].probs)))
        cross_key = "two_pointer_joint_max_dev"

    records: Records = []
    records += [
        (f"eigenvalue_a.{i}", fmt_real(a)) for i, a in enumerate(obs_a.eigenvalues)
    ]
    records += [
        (f"eigenvalue_b.{j}", fmt_real(b)) for j, b in enumerate(obs_b.eigenvalues)
    ]
    na, nb = joint.branch_counts
    for i in range(na):
        for j in range(nb):
            records.append((f"p_ij.{i}.{j}", fmt_real(joint.probs[i, j])))
    marg = marginal_a(joint)
    records += _distribution_records("p_i", marg.labels, marg.probs)
    for i in range(na):
        if float(marg.probs[i]) <= ZERO_PROB_CUTOFF:
            continue
        cond = conditional_b_given_a(joint, i)
        records += [
            (f"p_j_given_i.{i}.{j}", fmt_real(p))
            for j, p in zip(cond.labels, cond.probs)
        ]
    records.append(
        ("max_projection_deviation", fmt_real(projection_equivalence_report(setup)))
    )
    records.append((cross_key, fmt_real(cross_dev)))
    if final.dim <= 64:
        records += _state_records("final_state", final)
    return records


def _run_ll(scn: Scenario) -> Records:
    fields = dict(scn.fields)
    state = _resolve_state(fields, default="plus")
    obs = _resolve_observable(fields, "obs", state.dims, default="sigma_z")
    records: Records = []
    if scn.kind == "stern_gerlach":
        omegas_value = _take(fields, "omegas")
        omegas = (
            [0.5 * (n + 1) for n in range(obs.branch_count)]
            if omegas_value is None
            else _parse_floats(omegas_value, "omegas")
        )
        dt_value = _take(fields, "dt")
        dt = 1.0 if dt_value is None else _parse_float(dt_value, "dt")
        _reject_unknown(fields)
        unitaries = phase_unitaries(obs, omegas, dt)
        output = ll_channel(state, obs, unitaries)
        phase_dev = 0.0
        for rec in output:
            collapsed = project_update(state, obs, rec.branch_index)
            overlap = abs(inner(collapsed, rec.post_state))
            phase_dev = max(phase_dev, abs(1.0 - overlap))
            records.append((f"p.{rec.branch_index}", fmt_real(rec.probability)))
        records.append(("phase_only_max_dev", fmt_real(phase_dev)))
        return records
    target = _resolve_state(fields, key="target") if "target" in fields else None
    _reject_unknown(fields)
    if target is None:
        eye = np.eye(state.dim, dtype=complex)
        unitaries = [Operator(state.dims, eye) for _ in range(obs.branch_count)]
    else:
        unitaries = state_preparation_unitaries(state, obs, target)
    output = ll_channel(state, obs, unitaries)
    for rec in output:
        records.append((f"p.{rec.branch_index}", fmt_real(rec.probability)))
    for rec in output:
        records += _state_records(f"post_state.{rec.branch_index}", rec.post_state)
    if target is not None:
        dev = max(
            float(np.max(np.abs(rec.post_state.amps - target.amps)))
            for rec in output
        )
        records.append(("max_target_deviation", fmt_real(dev)))
    return records


def _run_telepathy(scn: Scenario) -> Records:
    fields = dict(scn.fields)
    state = _resolve_state(fields)
    if len(state.dims) != 2:
        raise ScenarioParseError(
            f"field 'state': telepathy needs 2 subsystems, got dims {state.dims}"
        )
    rule_value = _take(fields, "rule", "born")
    if rule_value == "born":
        if "q" in fields:
            raise ScenarioParseError("field 'q' only applies to nonborn_exponent")
        rule = BORN
    elif rule_value == "nonborn_exponent":
        q_value = _take(fields, "q")
        if q_value is None:
            raise ScenarioParseError("missing required field 'q'")
        rule = ProbabilityRule(_parse_float(q_value, "q"))
    else:
        raise ScenarioParseError(
            f"field 'rule': expected born or nonborn_exponent, got {rule_value!r}"
        )
    default_a = "sigma_z" if state.dims[0] == 2 else None
    default_b = "sigma_z" if state.dims[1] == 2 else None
    obs_a = _resolve_observable(fields, "obs_a", (state.dims[0],), default=default_a)
    obs_b = _resolve_observable(fields, "obs_b", (state.dims[1],), default=default_b)
    shots_value = _take(fields, "shots")
    shots = 0 if shots_value is None else _parse_int(shots_value, "shots")
    if shots < 0:
        raise ScenarioParseError(f"field 'shots': must be >= 0, got {shots}")
    _reject_unknown(fields)

    scenario = TelepathyScenario(state, obs_a, obs_b, rule)
    with_alice = bob_distribution_with_alice(scenario)
    without_alice = bob_distribution_without_alice(scenario)
    records: Records = [("rule", rule_value)]
    if rule.exponent != 1.0:
        records.append(("q", fmt_real(rule.exponent)))
    records += _distribution_records(
        "p_with_alice", with_alice.labels, with_alice.probs
    )
    records += _distribution_records(
        "p_without_alice", without_alice.labels, without_alice.probs
    )
    records.append(("signaling_gap", fmt_real(signaling_gap(scenario))))
    if shots > 0:
        rng = np.random.default_rng(scn.seed)
        mc_with = channel_simulation(scenario, 1, shots, rng)
        mc_without = channel_simulation(scenario, 0, shots, rng)
        gap = float(0.5 * np.abs(mc_with.probs - mc_without.probs).sum())
        records.append(("mc_shots", str(shots)))
        records += _distribution_records("mc_p_with_alice", mc_with.labels, mc_with.probs)
        records += _distribution_records(
            "mc_p_without_alice", mc_without.labels, mc_without.probs
        )
        records.append(("mc_gap", fmt_real(gap)))
    return records


def _run_entropy_demo(scn: Scenario) -> Records:
    fields = dict(scn.fields)
    state = _resolve_state(fields)
    obs = _resolve_observable(fields, "obs", state.dims, default="sigma_z")
    _reject_unknown(fields)
    rho = density_from_pure(state)
    dephased = nonselective_channel(rho, obs)
    records: Records = [
        ("entropy_initial", fmt_real(von_neumann_entropy(rho))),
        ("entropy_nonselective", fmt_real(von_neumann_entropy(dephased))),
    ]
    weights = branch_weights(state, obs)
    avg = 0.0
    for i in range(obs.branch_count):
        if weights[i] <= ZERO_PROB_CUTOFF:
            continue
        p, post = classical_selective(dephased, obs, i)
        s = von_neumann_entropy(post)
        avg += p * s
        records.append((f"p.{i}", fmt_real(p)))
        records.append((f"entropy_branch.{i}", fmt_real(s)))
    records.append(("entropy_selective_avg", fmt_real(avg)))
    return records


def run_scenario(scn: Scenario) -> Records:
    """Execute a parsed scenario and return its ordered records."""
    header: Records = [
        ("scenario", scn.source),
        ("kind", scn.kind),
        ("seed", str(scn.seed)),
    ]
    if scn.kind in ("two_pointer", "one_pointer", "epr"):
        return header + _run_pointer(scn)
    if scn.kind in ("stern_gerlach", "ll_scheme"):
        return header + _run_ll(scn)
    if scn.kind == "telepathy":
        return header + _run_telepathy(scn)
    if scn.kind == "entropy_demo":
        return header + _run_entropy_demo(scn)
    raise ScenarioParseError(f"unknown kind {scn.kind!r}")
