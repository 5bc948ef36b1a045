"""Hyper-CNOT: CNOT on polarization and on the spatial mode of two photons at once"""
import itertools
import logging
from typing import Dict, List

import numpy as np

from hyperent.models import BasisTag, DofKind
from hyperent.optics.cavity import hybrid_cnot_block, prepare_spins, spin_hadamard, spin_measure
from hyperent.optics.elements import ElementKind
from hyperent.optics.linear import hadamard_both
from hyperent.protocols.base_protocol import ProtocolReport, collect_corrections
from hyperent.protocols.concentration import local_op
from hyperent.state import Branch, PureState, correct, expand, from_weighted, photon, register, root

logger = logging.getLogger(__name__)


def _sign_fix(control: str, first: str, second: str):
    def rule(branch: Branch):
        ops = []
        if branch.token(f"{first}=") == "down":
            ops.append(local_op(ElementKind.SIGMA_Z_POL, control))
        if branch.token(f"{second}=") == "down":
            ops.append(local_op(ElementKind.SIGMA_Z_SPATIAL, control))
        return ops
    return rule


def hyper_cnot_branches(
    state: PureState,
    control: str = "A",
    target: str = "B",
    first: str = "e1",
    second: str = "e2",
) -> List[Branch]:
    """Gate sequence with two auxiliary spins in |+>; one corrected branch per spin readout"""
    state = prepare_spins(state, first, second)
    state = hadamard_both(state, control)
    state = hybrid_cnot_block(state, control, first, second)
    state = spin_hadamard(spin_hadamard(state, first), second)
    state = hybrid_cnot_block(state, target, first, second)
    state = hadamard_both(state, control)
    state = spin_hadamard(spin_hadamard(state, first), second)
    branches = expand([root(state)], lambda s: spin_measure(s, first, "z"))
    branches = expand(branches, lambda s: spin_measure(s, second, "z"))
    return correct(branches, _sign_fix(control, first, second))


def hyper_cnot(state: PureState, control: str = "A", target: str = "B") -> ProtocolReport:
    branches = hyper_cnot_branches(state, control, target)
    merged = from_weighted([(b.probability, b.state) for b in branches]).merged()
    return ProtocolReport(
        protocol="hyper-cnot",
        success=len(merged.members) == 1,
        output=merged.members[0][1] if len(merged.members) == 1 else merged,
        corrections=collect_corrections(branches),
        branches=branches,
        success_probability=sum(b.probability for b in branches),
        details={"branch_probabilities": {b.key: b.probability for b in branches}},
    )


def two_photon_layout(control: str = "A", target: str = "B"):
    return register(photon(control, DofKind.SPATIAL, BasisTag.CIRCULAR)
                    + photon(target, DofKind.SPATIAL, BasisTag.CIRCULAR))


def cnot_cnot_reference() -> np.ndarray:
    """16x16 CNOT(pol) x CNOT(path) in the (pol A, path A, pol B, path B) ordering"""
    matrix = np.zeros((16, 16), dtype=complex)
    for pa, sa, pb, sb in itertools.product((0, 1), repeat=4):
        source = 8 * pa + 4 * sa + 2 * pb + sb
        image = 8 * pa + 4 * sa + 2 * (pb ^ pa) + (sb ^ sa)
        matrix[image, source] = 1.0
    return matrix


def induced_operators(control: str = "A", target: str = "B") -> Dict[str, np.ndarray]:
    """Column j of each operator is the corrected post-state of basis input j in that spin branch"""
    layout = two_photon_layout(control, target)
    operators: Dict[str, np.ndarray] = {}
    for index, levels in enumerate(itertools.product(*(label.levels for label in layout.labels))):
        for branch in hyper_cnot_branches(PureState.basis_state(layout, levels), control, target):
            column = operators.setdefault(branch.key, np.zeros((16, 16), dtype=complex))
            column[:, index] = branch.state.amplitudes
    logger.debug(f"Induced hyper-CNOT action over {len(operators)} spin branches")
    return operators


def phase_deviation(actual: np.ndarray, expected: np.ndarray) -> float:
    """Max entrywise deviation after removing the best global phase"""
    overlap = np.vdot(expected, actual)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(actual - phase * expected)))
