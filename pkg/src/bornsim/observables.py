"""Observables as ordered families of eigenvalues and orthogonal projectors."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .core import HERM_TOL, Operator, _check_dims
from .errors import InvalidInputError, InvalidProjectorFamilyError, NotHermitianError

PROJ_TOL = 1e-10
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class Observable:
    """Hermitian observable resolved into measurement branches.

    Branch i carries eigenvalue eigenvalues[i] and projector projectors[i].
    Branches are canonically ordered by strictly increasing eigenvalue, the
    projectors are idempotent, pairwise orthogonal, and sum to the identity,
    all within PROJ_TOL.  The branch index, not the eigenvalue, is the outcome
    label used throughout this package.
    """

    dims: tuple[int, ...]
    eigenvalues: tuple[float, ...]
    projectors: tuple[Operator, ...]

    def __post_init__(self):
        dims = _check_dims(self.dims)
        eigenvalues = tuple(float(a) for a in self.eigenvalues)
        projectors = tuple(self.projectors)
        if not eigenvalues or len(eigenvalues) != len(projectors):
            raise InvalidProjectorFamilyError(
                f"{len(eigenvalues)} eigenvalues for {len(projectors)} projectors"
            )
        if any(not np.isfinite(a) for a in eigenvalues):
            raise InvalidProjectorFamilyError("non-finite eigenvalue")
        if any(b >= a for a, b in zip(eigenvalues[1:], eigenvalues)):
            raise InvalidProjectorFamilyError(
                f"eigenvalues not strictly increasing: {eigenvalues}"
            )
        d = prod(dims)
        for p in projectors:
            if not isinstance(p, Operator) or p.dims != dims:
                raise InvalidProjectorFamilyError(
                    f"projector dims mismatch: expected {dims}"
                )
            m = p.entries
            if np.max(np.abs(m - m.conj().T)) > PROJ_TOL:
                raise InvalidProjectorFamilyError("projector is not Hermitian")
            if np.max(np.abs(m @ m - m)) > PROJ_TOL:
                raise InvalidProjectorFamilyError("projector is not idempotent")
        for i in range(len(projectors)):
            for j in range(i + 1, len(projectors)):
                cross = projectors[i].entries @ projectors[j].entries
                if np.max(np.abs(cross)) > PROJ_TOL:
                    raise InvalidProjectorFamilyError(
                        f"projectors {i} and {j} are not orthogonal"
                    )
        total = sum(p.entries for p in projectors)
        if np.max(np.abs(total - np.eye(d))) > PROJ_TOL:
            raise InvalidProjectorFamilyError("projectors do not sum to identity")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "eigenvalues", eigenvalues)
        object.__setattr__(self, "projectors", projectors)

    @property
    def branch_count(self) -> int:
        return len(self.eigenvalues)

    @property
    def dim(self) -> int:
        return prod(self.dims)

    def eigenvalue(self, branch: int) -> float:
        self._check_branch(branch)
        return self.eigenvalues[branch]

    def projector(self, branch: int) -> Operator:
        self._check_branch(branch)
        return self.projectors[branch]

    def branch_rank(self, branch: int) -> int:
        """Multiplicity of a branch: the projector's trace rounded to int."""
        self._check_branch(branch)
        return int(round(np.trace(self.projectors[branch].entries).real))

    def branches(self):
        return tuple(zip(self.eigenvalues, self.projectors))

    def matrix(self) -> Operator:
        """Reconstruct the Hermitian matrix sum_i a_i P_i."""
        total = sum(a * p.entries for a, p in zip(self.eigenvalues, self.projectors))
        return Operator(self.dims, total)

    def _check_branch(self, branch: int) -> None:
        if not 0 <= branch < self.branch_count:
            raise InvalidInputError(
                f"branch {branch} out of range for {self.branch_count} branches"
            )


def observable_from_branches(branches, dims=None) -> Observable:
    """Build an Observable from (eigenvalue, projector) pairs.

    Projectors may be Operator instances or raw matrices (dims required then).
    Branches are sorted into canonical increasing-eigenvalue order; the family
    invariants are validated.
    """
    pairs = list(branches)
    if not pairs:
        raise InvalidProjectorFamilyError("no branches given")
    ops = []
    for a, p in pairs:
        if isinstance(p, Operator):
            ops.append((float(a), p))
        else:
            if dims is None:
                raise InvalidInputError("dims required for raw projector matrices")
            ops.append((float(a), Operator(dims, p)))
    ops.sort(key=lambda pair: pair[0])
    obs_dims = dims if dims is not None else ops[0][1].dims
    return Observable(
        _check_dims(obs_dims),
        tuple(a for a, _ in ops),
        tuple(p for _, p in ops),
    )


def observable_from_matrix(
    h, degeneracy_tol: float = DEGENERACY_TOL, dims=None
) -> Observable:
    """Eigendecompose a Hermitian matrix into branches.

    Eigenvalues closer than degeneracy_tol (single-linkage on the sorted
    spectrum) are merged into one branch whose eigenvalue is the cluster mean
    and whose projector spans the cluster's eigenvectors.
    """
    if isinstance(h, Operator):
        op = h
    else:
        m = np.asarray(h, dtype=complex)
        op = Operator(dims if dims is not None else (m.shape[0],), m)
    if not op.is_hermitian():
        dev = float(np.max(np.abs(op.entries - op.entries.conj().T)))
        raise NotHermitianError(f"matrix deviates from Hermitian by {dev!r}")
    evals, evecs = np.linalg.eigh(op.entries)
    branches = []
    start = 0
    for k in range(1, len(evals) + 1):
        if k == len(evals) or evals[k] - evals[k - 1] >= degeneracy_tol:
            vecs = evecs[:, start:k]
            proj = Operator(op.dims, vecs @ vecs.conj().T)
            branches.append((float(np.mean(evals[start:k])), proj))
            start = k
    return Observable(
        op.dims,
        tuple(a for a, _ in branches),
        tuple(p for _, p in branches),
    )


def embed_observable(obs: Observable, dims, subsystem: int) -> Observable:
    """Lift an observable on one subsystem to the composite system.

    Each projector becomes 1 (x) ... (x) P_i (x) ... (x) 1 at the given
    subsystem slot; eigenvalues and branch order are unchanged.
    """
    dims = _check_dims(dims)
    if not 0 <= subsystem < len(dims):
        raise InvalidInputError(f"subsystem {subsystem} out of range for {dims}")
    if obs.dims != (dims[subsystem],):
        raise InvalidInputError(
            f"observable dims {obs.dims} do not match subsystem dim "
            f"{dims[subsystem]}"
        )
    before = int(prod(dims[:subsystem]))
    after = int(prod(dims[subsystem + 1 :]))
    lifted = []
    for p in obs.projectors:
        m = np.kron(np.kron(np.eye(before), p.entries), np.eye(after))
        lifted.append(Operator(dims, m))
    return Observable(dims, obs.eigenvalues, tuple(lifted))
