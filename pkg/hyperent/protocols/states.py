"""Ideal state factories: hyper-Bell states, partial hyperentanglement, mixtures"""
import itertools
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from hyperent.config import settings
from hyperent.exceptions import ParameterError
from hyperent.models import BasisTag, BellLabel, DofKind, HyperBellLabel, PartialHyperParams, TimeBinParams
from hyperent.state import Ensemble, PureState, SubsystemLabel, fidelity, mix, photon, register

logger = logging.getLogger(__name__)

_SQRT_HALF = 1.0 / np.sqrt(2.0)

# two-qubit amplitude matrices M[x, y]; phi = even, psi = odd
BELL_MATRICES: Dict[BellLabel, np.ndarray] = {
    BellLabel.PHI_PLUS: np.array([[1, 0], [0, 1]], dtype=complex) * _SQRT_HALF,
    BellLabel.PHI_MINUS: np.array([[1, 0], [0, -1]], dtype=complex) * _SQRT_HALF,
    BellLabel.PSI_PLUS: np.array([[0, 1], [1, 0]], dtype=complex) * _SQRT_HALF,
    BellLabel.PSI_MINUS: np.array([[0, 1], [-1, 0]], dtype=complex) * _SQRT_HALF,
}

ERROR_MODELS = ("bitflip-phaseflip", "general")


def _pair_layout(carriers: Tuple[str, str], second: DofKind, basis: BasisTag):
    x, y = carriers
    return register(photon(x, second, basis) + photon(y, second, basis))


def _pair_state(carriers, second: DofKind, basis: BasisTag, pol: np.ndarray, other: np.ndarray) -> PureState:
    # layout order is (x.pol, x.other, y.pol, y.other)
    tensor = np.einsum("ac,bd->abcd", pol, other)
    return PureState(layout=_pair_layout(carriers, second, basis), amplitudes=tensor.reshape(-1))


def make_bell(
    label: BellLabel,
    kind: DofKind,
    carriers: Tuple[str, str] = ("A", "B"),
    basis: Optional[BasisTag] = None,
) -> PureState:
    """Two-qubit Bell state on one DOF of two carriers"""
    if basis is None:
        basis = {DofKind.POLARIZATION: BasisTag.LINEAR, DofKind.SPATIAL: BasisTag.PATH,
                 DofKind.TIMEBIN: BasisTag.BIN}[kind]
    labels = [SubsystemLabel(carrier=c, kind=kind, dimension=2, basis=basis) for c in carriers]
    return PureState(layout=register(labels), amplitudes=BELL_MATRICES[label].reshape(-1))


def make_hyper_bell(
    label: HyperBellLabel,
    carriers: Tuple[str, str] = ("A", "B"),
    polarization_basis: BasisTag = BasisTag.LINEAR,
) -> PureState:
    """Product of one Bell state in polarization and one in the spatial mode"""
    return _pair_state(carriers, DofKind.SPATIAL, polarization_basis,
                       BELL_MATRICES[label.pol], BELL_MATRICES[label.spat])


def make_partial(
    params: PartialHyperParams,
    carriers: Tuple[str, str] = ("A", "B"),
    polarization_basis: BasisTag = BasisTag.LINEAR,
) -> PureState:
    """(alpha|HH> + beta|VV>) (gamma|x1 y1> + delta|x2 y2>)"""
    pol = np.diag([params.alpha, params.beta]).astype(complex)
    spat = np.diag([params.gamma, params.delta]).astype(complex)
    return _pair_state(carriers, DofKind.SPATIAL, polarization_basis, pol, spat)


def make_partial_timebin(params: TimeBinParams, carriers: Tuple[str, str] = ("A", "B")) -> PureState:
    """(alpha|HH> + beta|VV>) (delta|SS> + eta|LL>)"""
    pol = np.diag([params.alpha, params.beta]).astype(complex)
    bins = np.diag([params.delta, params.eta]).astype(complex)
    return _pair_state(carriers, DofKind.TIMEBIN, BasisTag.LINEAR, pol, bins)


def make_timebin_hyper_bell(label: HyperBellLabel, carriers: Tuple[str, str] = ("A", "B")) -> PureState:
    """Bell state in polarization times Bell state in time bin (label.spat names the time-bin part)"""
    return _pair_state(carriers, DofKind.TIMEBIN, BasisTag.LINEAR,
                       BELL_MATRICES[label.pol], BELL_MATRICES[label.spat])


def _dof_weights(fidelity_value: float, error_model: str, error: BellLabel) -> List[Tuple[BellLabel, float]]:
    if error_model == "general":
        rest = (1.0 - fidelity_value) / 3.0
        return [(label, fidelity_value if label == BellLabel.PHI_PLUS else rest) for label in BellLabel]
    return [(BellLabel.PHI_PLUS, fidelity_value), (error, 1.0 - fidelity_value)]


def make_mixed(
    f1: float,
    f2: float,
    error_model: str = "bitflip-phaseflip",
    carriers: Tuple[str, str] = ("A", "B"),
    polarization_basis: BasisTag = BasisTag.CIRCULAR,
) -> Ensemble:
    """Hyper-Bell mixture with fidelity f1 in polarization and f2 in the spatial mode.

    The default model has bit-flip errors (psi+) in polarization and phase-flip
    errors (phi-) in the spatial mode; "general" spreads 1 - F evenly over the
    three other Bell states of each DOF. Zero-weight members are left out.
    """
    if error_model not in ERROR_MODELS:
        raise ParameterError(f"Unknown error model {error_model!r}; expected one of {ERROR_MODELS}")
    for name, value in (("F1", f1), ("F2", f2)):
        if not 0.0 <= value <= 1.0:
            raise ParameterError(f"{name} must lie in [0, 1], got {value}")
    members = []
    for (pol, w_pol), (spat, w_spat) in itertools.product(
        _dof_weights(f1, error_model, BellLabel.PSI_PLUS),
        _dof_weights(f2, error_model, BellLabel.PHI_MINUS),
    ):
        weight = w_pol * w_spat
        if weight <= 0.0:
            continue
        members.append((weight, make_hyper_bell(HyperBellLabel(pol=pol, spat=spat), carriers, polarization_basis)))
    logger.debug(f"Mixed state F1={f1}, F2={f2} ({error_model}) with {len(members)} members")
    return mix(members)


def make_hyper_ghz(carriers: Sequence[str], polarization_basis: BasisTag = BasisTag.LINEAR) -> PureState:
    """(|H...H> + |V...V>)(|1...1> + |2...2>)/2 over any number of photons"""
    if len(carriers) < 2:
        raise ParameterError("A hyperentangled GHZ state needs at least two photons")
    labels = []
    for carrier in carriers:
        labels.extend(photon(carrier, DofKind.SPATIAL, polarization_basis))
    layout = register(labels)
    tensor = np.zeros(layout.dims, dtype=complex)
    for p, s in itertools.product((0, 1), (0, 1)):
        tensor[tuple(x for _ in carriers for x in (p, s))] = 0.5
    return PureState(layout=layout, amplitudes=tensor.reshape(-1))


def classify_hyper_bell(
    state: PureState,
    carriers: Tuple[str, str] = ("A", "B"),
) -> Optional[HyperBellLabel]:
    """The hyper-Bell label the pair is in, or None if it is not one of the 16"""
    basis = state.layout.label(carriers[0], DofKind.POLARIZATION).basis
    for label in HyperBellLabel.all():
        target = make_hyper_bell(label, carriers, basis)
        if state.layout.size == target.layout.size and \
                fidelity(state, target) > 1.0 - settings.probability_tolerance:
            return label
    return None


def dof_fidelities(
    output,
    carriers: Tuple[str, str] = ("A", "B"),
    label: BellLabel = BellLabel.PHI_PLUS,
) -> Tuple[float, float]:
    """Fidelity of each DOF of a pair with the given Bell state"""
    x, y = carriers
    values = []
    for kind in (DofKind.POLARIZATION, DofKind.SPATIAL):
        basis = output.layout.label(x, kind).basis
        target = make_bell(label, kind, carriers, basis)
        values.append(fidelity(output, target, [(x, kind), (y, kind)]))
    return values[0], values[1]
