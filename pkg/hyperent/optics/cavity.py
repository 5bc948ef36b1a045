"""Double-sided QD-cavity spin-photon interface and the devices built from it.

Every device here is a chain of one ideal scattering event between local
optics. Photons must carry circular polarization and a two-port spatial mode;
spins are registered on demand and consumed by their readout.
"""
import logging
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from hyperent.exceptions import ParameterError, StateError
from hyperent.models import BasisTag, DofKind
from hyperent.optics.elements import HADAMARD, SIGMA_Z, ElementKind, element
from hyperent.optics.linear import apply_local, hadamard_both, hadamard_pol
from hyperent.state import Branch, PureState, apply_unitary, correct, expand, measure_discard, product
from hyperent.state import register, root, spin

logger = logging.getLogger(__name__)

# (polarization, path) basis with index 2p + q: R1, R2, L1, L2
SignedPermutation = Dict[int, Tuple[int, int]]

# Ideal reflection/transmission rules: input -> (sign, output)
SCATTER_UP: SignedPermutation = {0: (-1, 1), 1: (1, 3), 2: (1, 0), 3: (-1, 2)}
SCATTER_DOWN: SignedPermutation = {0: (1, 2), 1: (-1, 0), 2: (-1, 3), 3: (1, 1)}

# CPBS and wave-plate optics around each scattering event
_ENTRY_SWAP_L: SignedPermutation = {0: (1, 0), 1: (1, 1), 2: (-1, 3), 3: (-1, 2)}
_IDENTITY: SignedPermutation = {0: (1, 0), 1: (1, 1), 2: (1, 2), 3: (1, 3)}
_BLOCK_FIRST_EXIT: SignedPermutation = {0: (-1, 2), 1: (-1, 3), 2: (1, 1), 3: (1, 0)}
_BLOCK_SECOND_EXIT: SignedPermutation = {0: (1, 2), 1: (-1, 0), 2: (-1, 1), 3: (1, 3)}
_JOINING_EXIT: SignedPermutation = {0: (-1, 3), 1: (-1, 0), 2: (1, 2), 3: (1, 1)}

PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2.0)
MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2.0)


def _matrix(rules: SignedPermutation) -> np.ndarray:
    matrix = np.zeros((4, 4), dtype=complex)
    for source, (sign, target) in rules.items():
        matrix[target, source] = sign
    return matrix


def scatter_matrix() -> np.ndarray:
    """8x8 map on (polarization, path, spin) with spin fastest"""
    matrix = np.zeros((8, 8), dtype=complex)
    for s, rules in enumerate((SCATTER_UP, SCATTER_DOWN)):
        for source, (sign, target) in rules.items():
            matrix[2 * target + s, 2 * source + s] = sign
    return matrix


class CavityParams(BaseModel):
    """Rates and angular frequencies in one common unit"""
    model_config = ConfigDict(frozen=True)

    g: float = Field(ge=0.0)
    kappa: float = Field(gt=0.0)
    kappa_s: float = Field(default=0.0, ge=0.0)
    gamma: float = Field(default=0.0, ge=0.0)
    omega: float = 0.0
    omega_c: float = 0.0
    omega_x: float = 0.0

    @model_validator(mode="after")
    def check_finite(self) -> "CavityParams":
        for name, value in self.model_dump().items():
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        return self


def _cold_transmission(params: CavityParams) -> complex:
    return -params.kappa / (1j * (params.omega_c - params.omega) + params.kappa + params.kappa_s / 2)


def qd_coefficients(params: CavityParams) -> Tuple[complex, complex]:
    """Reflection and transmission (r, t) in the weak-excitation limit; r = 1 + t"""
    if params.g == 0.0:
        t = _cold_transmission(params)
        return 1 + t, t
    exciton = 1j * (params.omega_x - params.omega) + params.gamma / 2
    cavity = 1j * (params.omega_c - params.omega) + params.kappa + params.kappa_s / 2
    denominator = exciton * cavity + params.g ** 2
    if abs(denominator) == 0.0:
        raise ParameterError(f"Cavity response is singular for {params.model_dump()}")
    t = -params.kappa * exciton / denominator
    return 1 + t, t


def cavity_limits(params: CavityParams) -> Tuple[complex, complex, complex, complex]:
    """(r, t) for the coupled transition alongside (r0, t0) of the cold cavity"""
    r, t = qd_coefficients(params)
    t0 = _cold_transmission(params)
    return r, t, 1 + t0, t0


def _check_photon(state: PureState, photon: str) -> None:
    if not state.layout.has(photon, DofKind.POLARIZATION):
        raise StateError(f"Photon {photon} has no polarization subsystem")
    pol = state.layout.label(photon, DofKind.POLARIZATION)
    if pol.basis != BasisTag.CIRCULAR:
        raise StateError(f"QD-cavity devices need circular polarization on {photon}, got {pol.basis.value}")
    if not state.layout.has(photon, DofKind.SPATIAL) or state.layout.label(photon, DofKind.SPATIAL).dimension != 2:
        raise StateError(f"QD-cavity devices need a two-port spatial mode on {photon}")


def _photon_optics(state: PureState, photon: str, rules: SignedPermutation) -> PureState:
    return apply_unitary(state, [(photon, DofKind.POLARIZATION), (photon, DofKind.SPATIAL)], _matrix(rules))


def qd_scatter_ideal(state: PureState, photon: str, electron: str) -> PureState:
    """One pass of the photon through the cavity holding the electron spin"""
    _check_photon(state, photon)
    if not state.layout.has(electron, DofKind.SPIN):
        raise StateError(f"No spin registered for {electron}")
    targets = [(photon, DofKind.POLARIZATION), (photon, DofKind.SPATIAL), (electron, DofKind.SPIN)]
    return apply_unitary(state, targets, scatter_matrix())


def _stage(state: PureState, photon: str, electron: str,
           entry: SignedPermutation, exit_: SignedPermutation) -> PureState:
    state = _photon_optics(state, photon, entry)
    state = qd_scatter_ideal(state, photon, electron)
    return _photon_optics(state, photon, exit_)


def prepare_spins(state: PureState, *electrons: str, vector: np.ndarray = PLUS) -> PureState:
    """Append fresh spins, each in the given single-spin state (|+> by default)"""
    for electron in electrons:
        fresh = PureState(layout=register([spin(electron)]), amplitudes=vector)
        state = product(state, fresh)
    return state


def spin_hadamard(state: PureState, electron: str) -> PureState:
    return apply_unitary(state, [(electron, DofKind.SPIN)], HADAMARD)


def spin_measure(state: PureState, electron: str, basis: str = "z") -> List[Branch]:
    """Destructive spin readout; basis 'z' gives up/down, 'x' gives +/-"""
    if basis == "z":
        outcomes = [(f"{electron}=up", np.array([1, 0])), (f"{electron}=down", np.array([0, 1]))]
    elif basis == "x":
        outcomes = [(f"{electron}=+", PLUS), (f"{electron}=-", MINUS)]
    else:
        raise StateError(f"Spin readout basis must be 'z' or 'x', not {basis!r}")
    return measure_discard(state, [(electron, DofKind.SPIN)], outcomes)


def hybrid_cnot_block(state: PureState, photon: str, first: str, second: str) -> PureState:
    """Polarization flipped when the first spin is down; path flipped when the second is up, sign -1 when it is down"""
    _check_photon(state, photon)
    state = _stage(state, photon, first, _ENTRY_SWAP_L, _BLOCK_FIRST_EXIT)
    return _stage(state, photon, second, _IDENTITY, _BLOCK_SECOND_EXIT)


def joining_gate(state: PureState, photon: str, electron: str) -> PureState:
    """Spin-controlled polarization flip; the path is untouched"""
    _check_photon(state, photon)
    return _stage(state, photon, electron, _ENTRY_SWAP_L, _JOINING_EXIT)


def ps_qnd(state: PureState, x: str, y: str, first: str, second: str) -> List[Branch]:
    """Relative-phase check in both DOFs.

    first reads + for phase 0 in polarization (XX = +1), second reads - for
    phase 0 in the spatial mode. The photons are left untouched within each branch.
    Inputs that mix both phases give one branch per readout pair; phase_readout
    turns a branch into its (polarization phase, spatial phase).
    """
    state = prepare_spins(state, first, second)
    state = hybrid_cnot_block(state, x, first, second)
    state = hybrid_cnot_block(state, y, first, second)
    state = apply_unitary(state, [(second, DofKind.SPIN)], SIGMA_Z)
    branches = expand([root(state)], lambda s: spin_measure(s, first, "x"))
    branches = expand(branches, lambda s: spin_measure(s, second, "x"))
    logger.debug(f"P-S-QND({x},{y}): {[(b.key, round(b.probability, 12)) for b in branches]}")
    return branches


def ps_parity_qnd(state: PureState, x: str, y: str, first: str, second: str) -> List[Branch]:
    """Parity check in both DOFs: first = + for even polarization, second = - for even path.

    One branch per readout pair; parity_readout decodes a branch into its parities.
    """
    for photon in (x, y):
        state = hadamard_both(state, photon)

    def sandwich(branch_state: PureState) -> PureState:
        for photon in (x, y):
            branch_state = hadamard_both(branch_state, photon)
        return branch_state

    return [b.model_copy(update={"state": sandwich(b.state)}) for b in ps_qnd(state, x, y, first, second)]


def phase_readout(branch: Branch, first: str, second: str) -> Tuple[str, str]:
    """(polarization phase, spatial phase) as "0" or "pi" from the spin readouts of ps_qnd"""
    pol = "0" if branch.token(f"{first}=") == "+" else "pi"
    spat = "0" if branch.token(f"{second}=") == "-" else "pi"
    return pol, spat


def parity_readout(branch: Branch, first: str, second: str) -> Tuple[str, str]:
    """(polarization parity, spatial parity) from the two spin readouts of ps_parity_qnd"""
    pol = "even" if branch.token(f"{first}=") == "+" else "odd"
    spat = "even" if branch.token(f"{second}=") == "-" else "odd"
    return pol, spat


def qsjm(state: PureState, source: str, target: str, electron: str) -> List[Branch]:
    """Join the source photon's polarization onto the target photon.

    The source polarization is measured away; the target's spatial mode is kept.
    Corrections: sigma_x on the target if the source reads L, sigma_z if the spin reads down.
    """
    _check_photon(state, source)
    _check_photon(state, target)
    state = prepare_spins(state, electron)
    state = joining_gate(state, source, electron)
    pol_source = state.layout.label(source, DofKind.POLARIZATION)
    branches = expand(
        [root(state)],
        lambda s: measure_discard(
            s,
            [pol_source.key],
            [(f"{source}:{level}", np.eye(2)[i]) for i, level in enumerate(pol_source.levels)],
        ),
    )

    def transfer(s: PureState) -> List[Branch]:
        s = spin_hadamard(s, electron)
        s = joining_gate(s, target, electron)
        s = hadamard_pol(s, target)
        s = spin_hadamard(s, electron)
        s = joining_gate(s, target, electron)
        s = spin_hadamard(s, electron)
        return spin_measure(s, electron, "z")

    branches = expand(branches, transfer)

    def feed_forward(branch: Branch):
        rules = []
        if branch.token(f"{source}:") == "L":
            rules.append((f"sigmaX_pol({target})", lambda s: apply_local(s, target, element(ElementKind.SIGMA_X_POL))))
        if branch.token(f"{electron}=") == "down":
            rules.append((f"sigmaZ_pol({target})", lambda s: apply_local(s, target, element(ElementKind.SIGMA_Z_POL))))
        return rules

    return correct(branches, feed_forward)


# PBS-routed exchange of the two photonic qubits: R.a2 <-> L.a1
_DOF_SWAP: SignedPermutation = {0: (1, 0), 1: (1, 2), 2: (1, 1), 3: (1, 3)}


def dof_swap(state: PureState, photon: str) -> PureState:
    """Swap gate between the polarization and spatial-mode qubits of one photon"""
    _check_photon(state, photon)
    return _photon_optics(state, photon, _DOF_SWAP)


def qsjm_spatial(state: PureState, source: str, target: str, electron: str) -> List[Branch]:
    """Join the source photon's spatial-mode state onto the target's spatial mode"""
    state = dof_swap(dof_swap(state, source), target)
    branches = qsjm(state, source, target, electron)
    return [
        b.model_copy(update={"state": dof_swap(b.state, target)}) if b.accepted else b
        for b in branches
    ]
