import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from hyperent.config import settings
from hyperent.exceptions import StateError
from hyperent.state.register import SubsystemKey, SubsystemLabel, SystemLayout

logger = logging.getLogger(__name__)


class PureState(BaseModel):
    """Normalized amplitude vector over the tensor basis of a layout"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    layout: SystemLayout
    amplitudes: np.ndarray

    @field_validator("amplitudes", mode="before")
    @classmethod
    def as_complex_vector(cls, value) -> np.ndarray:
        vector = np.array(value, dtype=complex).reshape(-1)
        vector.setflags(write=False)
        return vector

    def __init__(self, **data):
        super().__init__(**data)
        if self.amplitudes.shape[0] != self.layout.size:
            raise StateError(
                f"Expected {self.layout.size} amplitudes for this layout, got {self.amplitudes.shape[0]}"
            )
        deviation = abs(np.linalg.norm(self.amplitudes) - 1.0)
        if deviation > settings.normalization_tolerance:
            raise StateError(f"State is not normalized (norm off by {deviation:.3e})")

    @classmethod
    def from_amplitudes(cls, layout: SystemLayout, amplitudes, normalize: bool = False) -> "PureState":
        vector = np.array(amplitudes, dtype=complex).reshape(-1)
        if normalize:
            norm = np.linalg.norm(vector)
            if norm == 0.0:
                raise StateError("Cannot normalize the zero vector")
            vector = vector / norm
        return cls(layout=layout, amplitudes=vector)

    @classmethod
    def basis_state(cls, layout: SystemLayout, levels: Sequence[str]) -> "PureState":
        """Product basis vector, one level name per subsystem in layout order"""
        if len(levels) != len(layout.labels):
            raise StateError(f"Need {len(layout.labels)} level names, got {len(levels)}")
        index = tuple(label.level_index(level) for label, level in zip(layout.labels, levels))
        vector = np.zeros(layout.dims, dtype=complex)
        vector[index] = 1.0
        return cls(layout=layout, amplitudes=vector)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)

    def amplitude(self, levels: Dict[SubsystemKey, str]) -> complex:
        """Amplitude of one basis vector given as {(carrier, kind): level}"""
        index = []
        for label in self.layout.labels:
            if label.key not in levels:
                raise StateError(f"No level given for {label}")
            index.append(label.level_index(levels[label.key]))
        return complex(self.tensor()[tuple(index)])

    def __repr__(self) -> str:
        terms = []
        for flat in np.flatnonzero(np.abs(self.amplitudes) > 1e-9):
            index = np.unravel_index(flat, self.layout.dims)
            name = "".join(label.levels[i] + " " for label, i in zip(self.layout.labels, index)).strip()
            value = self.amplitudes[flat]
            terms.append(f"({value.real:+.4f}{value.imag:+.4f}j)|{name}>")
        return " ".join(terms) or "<vacuum>"


def product(*states: PureState) -> PureState:
    """Tensor product in argument order"""
    if not states:
        raise StateError("product() needs at least one state")
    layout = states[0].layout
    vector = states[0].amplitudes
    for state in states[1:]:
        layout = layout.extend(state.layout)
        vector = np.kron(vector, state.amplitudes)
    return PureState(layout=layout, amplitudes=vector)


def relabel(state: PureState, carriers: Dict[str, str]) -> PureState:
    """Same amplitudes with carriers renamed, e.g. a copy of pair AB as pair CD"""
    labels = tuple(
        label.model_copy(update={"carrier": carriers.get(label.carrier, label.carrier)})
        for label in state.layout.labels
    )
    return PureState(layout=SystemLayout(labels=labels), amplitudes=state.amplitudes)


def _contract(tensor: np.ndarray, axes: List[int], matrix: np.ndarray) -> np.ndarray:
    k = len(axes)
    sub_dims = [tensor.shape[a] for a in axes]
    op = matrix.reshape(sub_dims + sub_dims)
    moved = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(moved, list(range(k)), axes)


def _target_axes(state: PureState, targets: Sequence[SubsystemKey]) -> List[int]:
    axes = state.layout.axes(targets)
    if len(set(axes)) != len(axes):
        raise StateError(f"Repeated target subsystem in {list(targets)}")
    return axes


def unitarity_deviation(matrix: np.ndarray) -> float:
    identity = np.eye(matrix.shape[1])
    return float(np.max(np.abs(matrix.conj().T @ matrix - identity)))


def apply_unitary(state: PureState, targets: Sequence[SubsystemKey], matrix) -> PureState:
    """Apply matrix on the joint space of targets, identity elsewhere"""
    matrix = np.asarray(matrix, dtype=complex)
    axes = _target_axes(state, targets)
    dim = int(np.prod([state.layout.dims[a] for a in axes]))
    if matrix.shape != (dim, dim):
        raise StateError(f"Matrix of shape {matrix.shape} does not act on target dimension {dim}")
    deviation = unitarity_deviation(matrix)
    if deviation > settings.unitarity_tolerance:
        raise StateError(f"Matrix is not unitary (max deviation {deviation:.3e})")
    tensor = _contract(state.tensor(), axes, matrix)
    return PureState(layout=state.layout, amplitudes=tensor.reshape(-1))


def apply_isometry(
    state: PureState,
    target: SubsystemKey,
    new_label: SubsystemLabel,
    matrix,
) -> PureState:
    """Map one subsystem into a (possibly larger) one through V with V^dagger V = I"""
    matrix = np.asarray(matrix, dtype=complex)
    axis = state.layout.axis(*target)
    old_dim = state.layout.dims[axis]
    if matrix.shape != (new_label.dimension, old_dim):
        raise StateError(
            f"Isometry of shape {matrix.shape} cannot map dimension {old_dim} to {new_label.dimension}"
        )
    deviation = unitarity_deviation(matrix)
    if deviation > settings.unitarity_tolerance:
        raise StateError(f"Matrix is not an isometry (max deviation {deviation:.3e})")
    layout = state.layout.replace(axis, new_label)
    op = matrix.reshape(new_label.dimension, old_dim)
    moved = np.tensordot(op, state.tensor(), axes=([1], [axis]))
    tensor = np.moveaxis(moved, 0, axis)
    return PureState(layout=layout, amplitudes=tensor.reshape(-1))


def apply_operator(state: PureState, targets: Sequence[SubsystemKey], matrix) -> Tuple[np.ndarray, float]:
    """Unnormalized action of a square operator; returns the vector and its squared norm"""
    matrix = np.asarray(matrix, dtype=complex)
    axes = _target_axes(state, targets)
    dim = int(np.prod([state.layout.dims[a] for a in axes]))
    if matrix.shape != (dim, dim):
        raise StateError(f"Operator of shape {matrix.shape} does not act on target dimension {dim}")
    tensor = _contract(state.tensor(), axes, matrix)
    vector = tensor.reshape(-1)
    return vector, float(np.vdot(vector, vector).real)


def marginal_matrix(state: PureState, targets: Sequence[SubsystemKey]) -> np.ndarray:
    """Amplitudes reshaped to (targets, rest) with targets in the given order"""
    axes = _target_axes(state, targets)
    rest = [i for i in range(len(state.layout.labels)) if i not in axes]
    dim = int(np.prod([state.layout.dims[a] for a in axes]))
    return np.transpose(state.tensor(), axes + rest).reshape(dim, -1)


def reduced_density_matrix(state: PureState, targets: Sequence[SubsystemKey]) -> np.ndarray:
    m = marginal_matrix(state, targets)
    return m @ m.conj().T


def equal_up_to_phase(a: PureState, b: PureState, tolerance: Optional[float] = None) -> bool:
    tolerance = settings.probability_tolerance if tolerance is None else tolerance
    if a.layout != b.layout:
        return False
    return abs(1.0 - abs(np.vdot(a.amplitudes, b.amplitudes))) < tolerance


def fingerprint(state: PureState, digits: int = 9) -> Tuple:
    """Hashable key identifying a state up to global phase"""
    vector = state.amplitudes
    pivot = vector[int(np.argmax(np.abs(vector) > 1e-6))]
    phased = vector * (abs(pivot) / pivot)
    rounded = np.round(phased, digits) + 0.0
    return (tuple(l.key for l in state.layout.labels),
            tuple(rounded.real.tolist()), tuple(rounded.imag.tolist()))
