"""Linear-optical elements and detector banks acting on labeled photons"""
import itertools
import logging
from typing import List, Sequence, Tuple

import numpy as np

from hyperent.exceptions import StateError
from hyperent.models import BasisTag, DofKind
from hyperent.optics.elements import ISOMETRIES, SQRT_HALF, ElementKind, ElementOp, element
from hyperent.state import Branch, PureState, SubsystemLabel, apply_isometry, apply_unitary
from hyperent.state import measure_discard, measure_projective

logger = logging.getLogger(__name__)

ARRIVAL_CLASSES = ("early", "middle", "late")

_ARRIVAL_VECTORS = {
    "early": np.array([1, 0, 0, 0], dtype=complex),
    # SL and LS arrive together; the two orthogonal combinations leave by different ports
    "middle+": np.array([0, 1, 1, 0], dtype=complex) * SQRT_HALF,
    "middle-": np.array([0, -1, 1, 0], dtype=complex) * SQRT_HALF,
    "late": np.array([0, 0, 0, 1], dtype=complex),
}


def _require(state: PureState, photon: str, kind: DofKind) -> SubsystemLabel:
    if not state.layout.has(photon, kind):
        raise StateError(f"Photon {photon} has no {kind.value} subsystem")
    return state.layout.label(photon, kind)


def apply_local(state: PureState, photon: str, op: ElementOp) -> PureState:
    """Apply one element to the subsystems of a single photon"""
    labels = [_require(state, photon, kind) for kind in op.targets]
    if op.kind in ISOMETRIES:
        (label,) = labels
        if op.kind == ElementKind.UBS:
            if label.dimension != 2:
                raise StateError(f"UBS needs a two-port spatial subsystem on {photon}")
            new_label = label.model_copy(update={"dimension": 3})
        else:
            new_label = SubsystemLabel(carrier=photon, kind=DofKind.ARRIVAL, dimension=4,
                                       basis=BasisTag.ARRIVAL)
        return apply_isometry(state, label.key, new_label, op.matrix)
    for label in labels:
        if label.dimension != 2:
            raise StateError(f"{op.kind.value} acts on two-level subsystems, {label} has {label.dimension}")
    return apply_unitary(state, [label.key for label in labels], op.matrix)


def hadamard_pol(state: PureState, photon: str) -> PureState:
    return apply_local(state, photon, element(ElementKind.H_POL))


def hadamard_spatial(state: PureState, photon: str) -> PureState:
    return apply_local(state, photon, element(ElementKind.H_SPATIAL))


def hadamard_both(state: PureState, photon: str) -> PureState:
    """H on polarization and on the spatial mode of one photon"""
    return hadamard_spatial(hadamard_pol(state, photon), photon)


def ubs_split(state: PureState, photon: str, reflection: float) -> PureState:
    """|a2> -> R|a2> + sqrt(1-R^2)|a3>, |a1> untouched"""
    return apply_local(state, photon, element(ElementKind.UBS, reflection))


def pockels(state: PureState, photon: str, time_bin: str) -> PureState:
    """Polarization bit flip on the amplitudes in one time bin"""
    kinds = {"S": ElementKind.POCKELS_S, "L": ElementKind.POCKELS_L}
    if time_bin not in kinds:
        raise StateError(f"Pockels cell fires on bin 'S' or 'L', not {time_bin!r}")
    return apply_local(state, photon, element(kinds[time_bin]))


def unbalanced_interferometer(state: PureState, photon: str) -> PureState:
    if state.layout.has(photon, DofKind.ARRIVAL):
        raise StateError(f"Photon {photon} has already passed an unbalanced interferometer")
    return apply_local(state, photon, element(ElementKind.UI))


def _two_photon_parity(
    state: PureState,
    kind: DofKind,
    x: str,
    y: str,
    device: str,
    even_token: str,
    odd_token: str,
) -> List[Branch]:
    for photon in (x, y):
        label = _require(state, photon, kind)
        if label.dimension != 2:
            raise StateError(f"Parity check needs two-level {kind.value} subsystems, {label} has {label.dimension}")
    even = np.diag([1, 0, 0, 1]).astype(complex)
    odd = np.eye(4, dtype=complex) - even
    return measure_projective(
        state,
        [(x, kind), (y, kind)],
        [(f"{device}={even_token}", even), (f"{device}={odd_token}", odd)],
    )


def pbs_parity_check(state: PureState, x: str, y: str) -> List[Branch]:
    """PBS plus one-photon-per-port postselection: even {HH, VV} vs odd {HV, VH}"""
    return _two_photon_parity(state, DofKind.POLARIZATION, x, y, f"PBS({x},{y})", "even", "odd")


def bs_hom_parity(state: PureState, x: str, y: str) -> List[Branch]:
    """HOM filter on the spatial modes: odd {x1y2, x2y1} is kept, even is discarded"""
    branches = _two_photon_parity(state, DofKind.SPATIAL, x, y, f"HOM({x},{y})", "even", "odd")
    return sorted(branches, key=lambda b: not b.outcome[0].endswith("odd"))


def _basis_vectors(label: SubsystemLabel, resolve_ports: bool) -> List[Tuple[str, np.ndarray]]:
    if label.kind == DofKind.ARRIVAL:
        return [(name if resolve_ports else arrival_class(name), vector)
                for name, vector in _ARRIVAL_VECTORS.items()]
    identity = np.eye(label.dimension, dtype=complex)
    return [(level, identity[i]) for i, level in enumerate(label.levels)]


def detect(
    state: PureState,
    photon: str,
    kinds: Sequence[DofKind] = (DofKind.POLARIZATION, DofKind.SPATIAL),
    resolve_ports: bool = False,
) -> List[Branch]:
    """Destructive detection of one photon; clicks are tokens like 'A:H,a1'.

    Arrival times are reported as early, middle or late. A middle click may come
    from either interferometer port, so it is recorded once per port under the same
    token; resolve_ports keeps them apart as middle+ and middle-.
    """
    labels = [_require(state, photon, kind) for kind in kinds]
    outcomes = []
    for combo in itertools.product(*(_basis_vectors(label, resolve_ports) for label in labels)):
        names = ",".join(name for name, _ in combo)
        vector = combo[0][1]
        for _, part in combo[1:]:
            vector = np.kron(vector, part)
        outcomes.append((f"{photon}:{names}", vector))
    branches = measure_discard(state, [label.key for label in labels], outcomes)
    logger.debug(f"Detector bank on {photon}: {len(branches)} click patterns")
    return branches


def clicks(branch: Branch, photon: str) -> List[str]:
    """Levels recorded by the last detection of photon in this branch"""
    return branch.token(f"{photon}:").split(",")


def arrival_class(level: str) -> str:
    return "middle" if level.startswith("middle") else level
