import logging
import math
from enum import Enum
from functools import lru_cache
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from hyperent.config import settings
from hyperent.exceptions import StateError
from hyperent.models import DofKind
from hyperent.state.pure import unitarity_deviation

logger = logging.getLogger(__name__)

SQRT_HALF = 1.0 / math.sqrt(2.0)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT_HALF
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# |H><V| - |V><H|
SIGMA_Y_PRIME = np.array([[0, 1], [-1, 0]], dtype=complex)
for _constant in (HADAMARD, SIGMA_X, SIGMA_Z, SIGMA_Y_PRIME):
    _constant.setflags(write=False)


class ElementKind(str, Enum):
    H_POL = "H_pol"
    H_SPATIAL = "H_spatial"
    SIGMA_X_POL = "sigmaX_pol"
    SIGMA_Z_POL = "sigmaZ_pol"
    SIGMA_Y_PRIME_POL = "sigmaY'_pol"
    SIGMA_X_SPATIAL = "sigmaX_spatial"
    SIGMA_Z_SPATIAL = "sigmaZ_spatial"
    SIGMA_Y_PRIME_SPATIAL = "sigmaY'_spatial"
    SIGMA_X_TIMEBIN = "sigmaX_timebin"
    SIGMA_Z_TIMEBIN = "sigmaZ_timebin"
    R_THETA = "R_theta"
    U_PHASE = "U_phase"
    UBS = "UBS"
    POCKELS_L = "PockelsL"
    POCKELS_S = "PockelsS"
    UI = "UI"


_TARGETS = {
    ElementKind.H_POL: (DofKind.POLARIZATION,),
    ElementKind.SIGMA_X_POL: (DofKind.POLARIZATION,),
    ElementKind.SIGMA_Z_POL: (DofKind.POLARIZATION,),
    ElementKind.SIGMA_Y_PRIME_POL: (DofKind.POLARIZATION,),
    ElementKind.R_THETA: (DofKind.POLARIZATION,),
    ElementKind.U_PHASE: (DofKind.POLARIZATION,),
    ElementKind.H_SPATIAL: (DofKind.SPATIAL,),
    ElementKind.SIGMA_X_SPATIAL: (DofKind.SPATIAL,),
    ElementKind.SIGMA_Z_SPATIAL: (DofKind.SPATIAL,),
    ElementKind.SIGMA_Y_PRIME_SPATIAL: (DofKind.SPATIAL,),
    ElementKind.UBS: (DofKind.SPATIAL,),
    ElementKind.SIGMA_X_TIMEBIN: (DofKind.TIMEBIN,),
    ElementKind.SIGMA_Z_TIMEBIN: (DofKind.TIMEBIN,),
    ElementKind.UI: (DofKind.TIMEBIN,),
    ElementKind.POCKELS_L: (DofKind.POLARIZATION, DofKind.TIMEBIN),
    ElementKind.POCKELS_S: (DofKind.POLARIZATION, DofKind.TIMEBIN),
}

# Elements that change the dimension of the subsystem they act on
ISOMETRIES = (ElementKind.UBS, ElementKind.UI)


def _pockels(active_bin: int) -> np.ndarray:
    # (polarization, timebin) with timebin fastest; flip polarization on one bin only
    matrix = np.eye(4, dtype=complex)
    for p in (0, 1):
        matrix[p * 2 + active_bin, p * 2 + active_bin] = 0.0
        matrix[(1 - p) * 2 + active_bin, p * 2 + active_bin] = 1.0
    return matrix


def _compute(kind: ElementKind, parameters: Tuple[float, ...]) -> np.ndarray:
    if kind in (ElementKind.H_POL, ElementKind.H_SPATIAL):
        return HADAMARD
    if kind in (ElementKind.SIGMA_X_POL, ElementKind.SIGMA_X_SPATIAL, ElementKind.SIGMA_X_TIMEBIN):
        return SIGMA_X
    if kind in (ElementKind.SIGMA_Z_POL, ElementKind.SIGMA_Z_SPATIAL, ElementKind.SIGMA_Z_TIMEBIN):
        return SIGMA_Z
    if kind in (ElementKind.SIGMA_Y_PRIME_POL, ElementKind.SIGMA_Y_PRIME_SPATIAL):
        return SIGMA_Y_PRIME
    if kind == ElementKind.R_THETA:
        (theta,) = parameters
        c, s = math.cos(theta), math.sin(theta)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == ElementKind.U_PHASE:
        phase = parameters[0] if parameters else math.pi
        return np.exp(1j * phase) * np.eye(2, dtype=complex)
    if kind == ElementKind.UBS:
        (reflection,) = parameters
        matrix = np.zeros((3, 2), dtype=complex)
        matrix[0, 0] = 1.0
        matrix[1, 1] = reflection
        matrix[2, 1] = math.sqrt(1.0 - reflection ** 2)
        return matrix
    if kind == ElementKind.POCKELS_S:
        return _pockels(0)
    if kind == ElementKind.POCKELS_L:
        return _pockels(1)
    if kind == ElementKind.UI:
        # S -> (SS + SL)/sqrt2, L -> (LS + LL)/sqrt2
        matrix = np.zeros((4, 2), dtype=complex)
        matrix[0, 0] = matrix[1, 0] = SQRT_HALF
        matrix[2, 1] = matrix[3, 1] = SQRT_HALF
        return matrix
    raise StateError(f"No matrix defined for element {kind.value}")


@lru_cache(maxsize=None)
def _build(kind: ElementKind, parameters: Tuple[float, ...]) -> np.ndarray:
    matrix = np.array(_compute(kind, parameters), dtype=complex)
    matrix.setflags(write=False)
    return matrix


class ElementOp(BaseModel):
    """A linear-optical element with its fixed matrix"""
    model_config = ConfigDict(frozen=True)

    kind: ElementKind
    parameters: Tuple[float, ...] = ()

    def __init__(self, **data):
        super().__init__(**data)
        if self.kind == ElementKind.UBS:
            if len(self.parameters) != 1 or not 0.0 < self.parameters[0] < 1.0:
                raise StateError(f"UBS reflection coefficient must lie in (0, 1), got {self.parameters}")
        if self.kind == ElementKind.R_THETA and len(self.parameters) != 1:
            raise StateError("R_theta takes exactly one angle")
        deviation = unitarity_deviation(self.matrix)
        if deviation > settings.unitarity_tolerance:
            raise StateError(f"Element {self.kind.value} is not unitary (max deviation {deviation:.3e})")

    @property
    def matrix(self) -> np.ndarray:
        return _build(self.kind, tuple(self.parameters))

    @property
    def targets(self) -> Tuple[DofKind, ...]:
        return _TARGETS[self.kind]

    def __str__(self) -> str:
        if self.parameters:
            return f"{self.kind.value}({', '.join(f'{p:g}' for p in self.parameters)})"
        return self.kind.value


def element(kind: ElementKind, *parameters: float) -> ElementOp:
    return ElementOp(kind=kind, parameters=tuple(float(p) for p in parameters))
