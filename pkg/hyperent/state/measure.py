import logging
from typing import List, Sequence, Tuple

import numpy as np

from hyperent.config import settings
from hyperent.exceptions import StateError
from hyperent.state.branch import Branch
from hyperent.state.pure import PureState, apply_operator
from hyperent.state.register import SubsystemKey, SubsystemLabel

logger = logging.getLogger(__name__)


def _check_branch_sum(branches: List[Branch], dropped: float) -> None:
    total = sum(b.probability for b in branches) + dropped
    if abs(total - 1.0) > settings.probability_tolerance:
        raise StateError(f"Branch probabilities sum to {total:.12f}, not 1")


def _target_dimension(state: PureState, targets: Sequence[SubsystemKey]) -> int:
    return int(np.prod([state.layout.dims[a] for a in state.layout.axes(targets)]))


def measure_kraus(
    state: PureState,
    targets: Sequence[SubsystemKey],
    operators: Sequence[Tuple[str, np.ndarray]],
) -> List[Branch]:
    """Generalized measurement with Kraus operators on the targets"""
    dim = _target_dimension(state, targets)
    total = np.zeros((dim, dim), dtype=complex)
    for token, op in operators:
        op = np.asarray(op, dtype=complex)
        if op.shape != (dim, dim):
            raise StateError(f"Operator {token!r} has shape {op.shape}, targets need ({dim}, {dim})")
        total += op.conj().T @ op
    deficiency = float(np.linalg.norm(np.eye(dim) - total, 2))
    if deficiency > settings.unitarity_tolerance:
        raise StateError(f"Measurement operators are incomplete (deficiency norm {deficiency:.3e})")

    branches: List[Branch] = []
    dropped = 0.0
    for token, op in operators:
        vector, probability = apply_operator(state, targets, op)
        if probability < settings.zero_branch_threshold:
            dropped += probability
            continue
        post = PureState(layout=state.layout, amplitudes=vector / np.sqrt(probability))
        branches.append(Branch(outcome=(token,), probability=probability, state=post))
    _check_branch_sum(branches, dropped)
    return branches


def measure_projective(
    state: PureState,
    targets: Sequence[SubsystemKey],
    projectors: Sequence[Tuple[str, np.ndarray]],
) -> List[Branch]:
    """Nondestructive projective measurement; zero-probability outcomes are omitted"""
    for token, projector in projectors:
        projector = np.asarray(projector, dtype=complex)
        hermitian = np.max(np.abs(projector - projector.conj().T))
        idempotent = np.max(np.abs(projector @ projector - projector))
        if max(hermitian, idempotent) > settings.unitarity_tolerance:
            raise StateError(f"Operator {token!r} is not a projector")
    return measure_kraus(state, targets, projectors)


def measure_levels(
    state: PureState,
    target: SubsystemKey,
    groups: Sequence[Tuple[str, Sequence[int]]],
) -> List[Branch]:
    """Project one subsystem onto groups of its levels.

    A single-level group is a click that removes the subsystem; a larger group
    restricts the subsystem to those levels.
    """
    axis = state.layout.axis(*target)
    label = state.layout.labels[axis]
    covered = sorted(level for _, levels in groups for level in levels)
    if covered != list(range(label.dimension)):
        raise StateError(f"Level groups {covered} do not partition the {label.dimension} levels of {label}")

    tensor = state.tensor()
    branches: List[Branch] = []
    dropped = 0.0
    for token, levels in groups:
        if len(levels) == 1:
            sliced = np.take(tensor, levels[0], axis=axis)
            layout = state.layout.without([axis])
        else:
            sliced = np.take(tensor, list(levels), axis=axis)
            restricted = SubsystemLabel(carrier=label.carrier, kind=label.kind,
                                        dimension=len(levels), basis=label.basis)
            layout = state.layout.replace(axis, restricted)
        vector = sliced.reshape(-1)
        probability = float(np.vdot(vector, vector).real)
        if probability < settings.zero_branch_threshold:
            dropped += probability
            continue
        post = PureState(layout=layout, amplitudes=vector / np.sqrt(probability))
        branches.append(Branch(outcome=(token,), probability=probability, state=post))
    _check_branch_sum(branches, dropped)
    return branches


def measure_discard(
    state: PureState,
    targets: Sequence[SubsystemKey],
    outcomes: Sequence[Tuple[str, np.ndarray]],
) -> List[Branch]:
    """Destructive measurement onto orthonormal vectors of the joint target space.

    The measured subsystems are removed from the post-measurement layout.
    """
    axes = state.layout.axes(targets)
    dim = _target_dimension(state, targets)
    basis = np.array([np.asarray(v, dtype=complex).reshape(-1) for _, v in outcomes])
    if basis.shape != (dim, dim):
        raise StateError(f"Need {dim} outcome vectors of length {dim}, got shape {basis.shape}")
    deficiency = float(np.linalg.norm(np.eye(dim) - basis.T @ basis.conj(), 2))
    if deficiency > settings.unitarity_tolerance:
        raise StateError(f"Outcome vectors are not a complete basis (deficiency norm {deficiency:.3e})")

    rest = [i for i in range(len(state.layout.labels)) if i not in axes]
    matrix = np.transpose(state.tensor(), axes + rest).reshape(dim, -1)
    layout = state.layout.without(axes)
    branches: List[Branch] = []
    dropped = 0.0
    for (token, _), vector in zip(outcomes, basis):
        remainder = vector.conj() @ matrix
        probability = float(np.vdot(remainder, remainder).real)
        if probability < settings.zero_branch_threshold:
            dropped += probability
            continue
        post = PureState(layout=layout, amplitudes=remainder / np.sqrt(probability))
        branches.append(Branch(outcome=(token,), probability=probability, state=post))
    _check_branch_sum(branches, dropped)
    return branches
