"""Cross-Kerr parity-check devices read out by an X-quadrature homodyne measurement.

The probe is not simulated as a field mode. Each readout is a projective
measurement whose outcome classes follow the phase bookkeeping; +theta and
-theta cannot be told apart and form one "shifted" class.
"""
import logging
from enum import Enum
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict

from hyperent.exceptions import StateError
from hyperent.models import DofKind
from hyperent.state import Branch, PureState, measure_projective

logger = logging.getLogger(__name__)


class ProbeClass(str, Enum):
    SHIFTED = "shifted"
    UNSHIFTED = "unshifted"
    THETA_13 = "theta1+theta3"
    THETA_24 = "theta2+theta4"
    THETA_14 = "theta1+theta4"
    THETA_23 = "theta2+theta3"


class ProbeOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    device: str
    phase_class: ProbeClass

    @property
    def token(self) -> str:
        return f"{self.device}={self.phase_class.value}"

    @classmethod
    def parse(cls, token: str) -> "ProbeOutcome":
        device, _, value = token.partition("=")
        return cls(device=device, phase_class=ProbeClass(value))


# joint basis index of two qubits -> phase class of the spatial analyzer
_ANALYZER_CLASSES = (
    (0, ProbeClass.THETA_13),  # c1d1
    (3, ProbeClass.THETA_24),  # c2d2
    (1, ProbeClass.THETA_14),  # c1d2
    (2, ProbeClass.THETA_23),  # c2d1
)


def _check_two_level(state: PureState, photon: str, kind: DofKind) -> None:
    if not state.layout.has(photon, kind):
        raise StateError(f"Photon {photon} has no {kind.value} subsystem")
    label = state.layout.label(photon, kind)
    if label.dimension != 2:
        raise StateError(f"Cross-Kerr device needs a two-level {label}, got dimension {label.dimension}")


def _parity_qnd(state: PureState, kind: DofKind, x: str, y: str, device: str) -> List[Branch]:
    for photon in (x, y):
        _check_two_level(state, photon, kind)
    even = np.diag([1, 0, 0, 1]).astype(complex)
    odd = np.eye(4, dtype=complex) - even
    branches = measure_projective(
        state,
        [(x, kind), (y, kind)],
        [
            (ProbeOutcome(device=device, phase_class=ProbeClass.SHIFTED).token, even),
            (ProbeOutcome(device=device, phase_class=ProbeClass.UNSHIFTED).token, odd),
        ],
    )
    logger.debug(f"{device}: {[(b.outcome[0], round(b.probability, 12)) for b in branches]}")
    return branches


def xkerr_parity_pol(state: PureState, x: str, y: str) -> List[Branch]:
    """Polarization parity QND: shifted = even {HH, VV}, unshifted = odd {HV, VH}"""
    return _parity_qnd(state, DofKind.POLARIZATION, x, y, f"P-QND({x},{y})")


def xkerr_parity_spatial(state: PureState, x: str, y: str) -> List[Branch]:
    """Spatial parity QND: shifted = even {x1y1, x2y2}, unshifted = odd {x1y2, x2y1}"""
    return _parity_qnd(state, DofKind.SPATIAL, x, y, f"S-QND({x},{y})")


def xkerr_spatial_analyzer(state: PureState, x: str, y: str) -> List[Branch]:
    """Four-class phase readout resolving every joint spatial basis state"""
    for photon in (x, y):
        _check_two_level(state, photon, DofKind.SPATIAL)
    device = f"S-QND2({x},{y})"
    projectors = []
    for index, phase_class in _ANALYZER_CLASSES:
        projector = np.zeros((4, 4), dtype=complex)
        projector[index, index] = 1.0
        projectors.append((ProbeOutcome(device=device, phase_class=phase_class).token, projector))
    return measure_projective(state, [(x, DofKind.SPATIAL), (y, DofKind.SPATIAL)], projectors)


def is_even(branch: Branch, device_prefix: str) -> bool:
    """True when the last readout of a parity device reported the shifted class"""
    return branch.token(f"{device_prefix}=") == ProbeClass.SHIFTED.value
