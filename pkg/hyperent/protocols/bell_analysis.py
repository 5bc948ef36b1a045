"""Hyperentangled Bell-state analysis and the protocols built on it"""
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from hyperent.config import settings
from hyperent.exceptions import StateError
from hyperent.models import BellLabel, DofKind, HyperBellLabel, PartialHyperParams
from hyperent.optics.elements import ElementKind, element
from hyperent.optics.kerr import ProbeClass, xkerr_parity_pol, xkerr_parity_spatial, xkerr_spatial_analyzer
from hyperent.optics.linear import apply_local, clicks, detect, hadamard_pol, hadamard_spatial
from hyperent.protocols.base_protocol import ProtocolReport, collect_corrections
from hyperent.protocols.states import make_hyper_bell
from hyperent.state import Branch, PureState, coarse_grain, correct, evolve, expand, fidelity, from_weighted
from hyperent.state import photon, product, register, root

logger = logging.getLogger(__name__)

_EVEN_ANALYZER = (ProbeClass.THETA_13.value, ProbeClass.THETA_24.value)

# per-DOF Pauli frame fix for each Bell outcome
BELL_CORRECTIONS: Dict[DofKind, Dict[BellLabel, Optional[ElementKind]]] = {
    DofKind.POLARIZATION: {
        BellLabel.PHI_PLUS: None,
        BellLabel.PHI_MINUS: ElementKind.SIGMA_Z_POL,
        BellLabel.PSI_PLUS: ElementKind.SIGMA_X_POL,
        BellLabel.PSI_MINUS: ElementKind.SIGMA_Y_PRIME_POL,
    },
    DofKind.SPATIAL: {
        BellLabel.PHI_PLUS: None,
        BellLabel.PHI_MINUS: ElementKind.SIGMA_Z_SPATIAL,
        BellLabel.PSI_PLUS: ElementKind.SIGMA_X_SPATIAL,
        BellLabel.PSI_MINUS: ElementKind.SIGMA_Y_PRIME_SPATIAL,
    },
}


def _bell(even: bool, plus: bool) -> BellLabel:
    if even:
        return BellLabel.PHI_PLUS if plus else BellLabel.PHI_MINUS
    return BellLabel.PSI_PLUS if plus else BellLabel.PSI_MINUS


def hbsa_label(branch: Branch, x: str, y: str) -> HyperBellLabel:
    """Read the hyper-Bell label off the outcome record of one analyzer branch"""
    spatial_even = branch.token(f"S-QND({x},{y})=") == ProbeClass.SHIFTED.value
    analyzer_even = branch.token(f"S-QND2({x},{y})=") in _EVEN_ANALYZER
    pol_even = branch.token(f"P-QND({x},{y})=") == ProbeClass.SHIFTED.value
    same_clicks = clicks(branch, x)[0] == clicks(branch, y)[0]
    return HyperBellLabel(pol=_bell(pol_even, same_clicks), spat=_bell(spatial_even, analyzer_even))


def hbsa_branches(state: PureState, x: str = "A", y: str = "B") -> List[Branch]:
    """Two-stage analysis; both photons are detected at the end"""
    branches = expand([root(state)], lambda s: xkerr_parity_spatial(s, x, y))
    branches = evolve(branches, lambda s: hadamard_spatial(hadamard_spatial(s, x), y))
    branches = expand(branches, lambda s: xkerr_spatial_analyzer(s, x, y))
    branches = expand(branches, lambda s: xkerr_parity_pol(s, x, y))
    branches = evolve(branches, lambda s: hadamard_pol(hadamard_pol(s, x), y))
    branches = expand(branches, lambda s: detect(s, x))
    return expand(branches, lambda s: detect(s, y))


def _label_token(x: str, y: str):
    return lambda branch: f"HBSA({x},{y})={hbsa_label(branch, x, y)}"


def hbsa(state: PureState, x: str = "A", y: str = "B") -> Tuple[Optional[HyperBellLabel], ProtocolReport]:
    """Classify a two-photon state among the 16 hyper-Bell states.

    Click patterns are grouped by the label they announce. Returns the label when
    one label carries all the probability, otherwise None.
    """
    branches = coarse_grain(hbsa_branches(state, x, y), _label_token(x, y))
    distribution: Dict[str, float] = {}
    for branch in branches:
        name = branch.token(f"HBSA({x},{y})=")
        distribution[name] = distribution.get(name, 0.0) + branch.probability
    label = None
    if len(distribution) == 1:
        pol, spat = branches[0].token(f"HBSA({x},{y})=").strip("()").split(", ")
        label = HyperBellLabel(pol=BellLabel(pol), spat=BellLabel(spat))
    report = ProtocolReport(
        protocol="hbsa",
        success=label is not None,
        branches=branches,
        success_probability=sum(b.probability for b in branches),
        details={"label": str(label) if label else None, "labels": distribution},
    )
    logger.debug(f"HBSA on ({x},{y}): {distribution}")
    return label, report


def correction_rule(target: str, x: str, y: str):
    """Feed-forward for teleportation and swapping: undo the Bell frame on target"""
    def rule(branch: Branch):
        label = hbsa_label(branch, x, y)
        ops = []
        for kind, bell in ((DofKind.POLARIZATION, label.pol), (DofKind.SPATIAL, label.spat)):
            kind_op = BELL_CORRECTIONS[kind][bell]
            if kind_op is not None:
                op = element(kind_op)
                ops.append((f"{op}({target})", lambda s, op=op: apply_local(s, target, op)))
        return ops
    return rule


def _analyse_and_correct(state: PureState, x: str, y: str, target: str) -> List[Branch]:
    raw = correct(hbsa_branches(state, x, y), correction_rule(target, x, y))
    return coarse_grain(raw, _label_token(x, y))


def single_photon(carrier: str, params: PartialHyperParams) -> PureState:
    """(alpha|H> + beta|V>)(gamma|x1> + delta|x2>) on one photon"""
    amplitudes = np.kron([params.alpha, params.beta], [params.gamma, params.delta])
    return PureState(layout=register(photon(carrier)), amplitudes=amplitudes)


def teleport(params: PartialHyperParams, channel: Optional[PureState] = None) -> ProtocolReport:
    """Teleport the hyperencoded state of photon A onto photon C over the pair (B, C)"""
    if channel is None:
        channel = make_hyper_bell(HyperBellLabel(pol=BellLabel.PHI_PLUS, spat=BellLabel.PHI_PLUS), ("B", "C"))
    if channel.layout.carriers() != ["B", "C"]:
        raise StateError(f"The channel must be a pair on carriers B and C, got {channel.layout.carriers()}")
    state = product(single_photon("A", params), channel)
    branches = _analyse_and_correct(state, "A", "B", "C")

    target = single_photon("C", params)
    fidelities = {b.key: fidelity(b.state, target) for b in branches}
    worst = min(fidelities.values())
    degraded = worst < 1.0 - settings.probability_tolerance
    if degraded:
        logger.info(f"Teleportation channel is not maximally hyperentangled: worst fidelity {worst:.6f}")
    output = from_weighted([(b.probability, b.state) for b in branches]).merged()
    return ProtocolReport(
        protocol="teleport",
        success=not degraded,
        output=output.members[0][1] if len(output.members) == 1 else output,
        corrections=collect_corrections(branches),
        branches=branches,
        success_probability=sum(b.probability for b in branches),
        details={
            "fidelity": fidelity(output, target),
            "min_branch_fidelity": worst,
            "degraded": degraded,
            "branch_fidelities": fidelities,
        },
    )


def swap() -> ProtocolReport:
    """Entanglement swapping of two hyper-Bell pairs AB and CD by analysing (B, C)"""
    phi = HyperBellLabel(pol=BellLabel.PHI_PLUS, spat=BellLabel.PHI_PLUS)
    state = product(make_hyper_bell(phi, ("A", "B")), make_hyper_bell(phi, ("C", "D")))
    branches = _analyse_and_correct(state, "B", "C", "A")

    target = make_hyper_bell(phi, ("A", "D"))
    fidelities = {b.key: fidelity(b.state, target) for b in branches}
    output = from_weighted([(b.probability, b.state) for b in branches]).merged()
    return ProtocolReport(
        protocol="swap",
        success=min(fidelities.values()) > 1.0 - settings.probability_tolerance,
        output=output.members[0][1] if len(output.members) == 1 else output,
        corrections=collect_corrections(branches),
        branches=branches,
        success_probability=sum(b.probability for b in branches),
        details={
            "fidelity": fidelity(output, target),
            "branch_fidelities": fidelities,
        },
    )
