"""Hyperentanglement concentration: distil maximally hyperentangled pairs from partial ones"""
import logging
import math
from typing import Dict, List, Tuple

import numpy as np

from hyperent.config import settings
from hyperent.exceptions import ParameterError
from hyperent.models import BellLabel, DofKind, HyperBellLabel, PartialHyperParams, TimeBinParams
from hyperent.optics.elements import ElementKind, element
from hyperent.optics.kerr import ProbeClass, xkerr_parity_pol, xkerr_parity_spatial
from hyperent.optics.linear import (
    apply_local,
    arrival_class,
    bs_hom_parity,
    clicks,
    detect,
    hadamard_both,
    hadamard_pol,
    pbs_parity_check,
    pockels,
    ubs_split,
    unbalanced_interferometer,
)
from hyperent.protocols.base_protocol import ProtocolReport, collect_corrections
from hyperent.protocols.states import make_hyper_bell, make_partial, make_partial_timebin
from hyperent.protocols.states import make_timebin_hyper_bell
from hyperent.state import Branch, coarse_grain, correct, evolve, expand, fidelity, from_weighted, keep
from hyperent.state import fingerprint, measure_kraus, measure_levels, product, relabel, root

logger = logging.getLogger(__name__)

PHI_PHI = HyperBellLabel(pol=BellLabel.PHI_PLUS, spat=BellLabel.PHI_PLUS)


def local_op(kind: ElementKind, photon: str):
    op = element(kind)
    return f"{op}({photon})", lambda s: apply_local(s, photon, op)


def _path_index(level: str) -> int:
    return int(level[-1])


def pair_feed_forward(x: str, y: str, target: str):
    """sigma_z on the target DOF whose clicks on x and y disagree after the Hadamards"""
    def rule(branch: Branch):
        click_x, click_y = clicks(branch, x), clicks(branch, y)
        ops = []
        if click_x[0] != click_y[0]:
            ops.append(local_op(ElementKind.SIGMA_Z_POL, target))
        if _path_index(click_x[1]) != _path_index(click_y[1]):
            ops.append(local_op(ElementKind.SIGMA_Z_SPATIAL, target))
        return ops
    return rule


def _output(branches: List[Branch]):
    accepted = [(b.probability, b.state) for b in branches if b.accepted]
    if not accepted:
        return None
    merged = from_weighted(accepted).merged()
    return merged.members[0][1] if len(merged.members) == 1 else merged


def _finish(protocol: str, branches: List[Branch], target, details: Dict) -> ProtocolReport:
    output = _output(branches)
    success_probability = sum(b.probability for b in branches if b.accepted)
    if output is not None:
        details["fidelity"] = fidelity(output, target)
    logger.info(f"{protocol}: success probability {success_probability:.12f}")
    return ProtocolReport(
        protocol=protocol,
        success=success_probability > 0.0,
        output=output,
        corrections=collect_corrections(branches),
        branches=branches,
        success_probability=success_probability,
        details=details,
    )


def _opposite_signs(x: float, y: float) -> bool:
    return x * y < 0


def ecp_param_split(params: PartialHyperParams, allow_permutation: bool = False) -> ProtocolReport:
    """Concentration with known parameters by splitting off the excess amplitude of photon A.

    The weak spatial amplitude sets the UBS reflection R = |gamma|/|delta|; the strong
    polarization component is rotated by theta = arccos(|beta|/|alpha|) and the rotated
    part leaves through the primed ports. Orderings other than |alpha| > |beta|,
    |gamma| < |delta| need allow_permutation and are handled by relabeling.
    """
    a, b, g, d = (abs(params.alpha), abs(params.beta), abs(params.gamma), abs(params.delta))
    if not (a >= b and g <= d) and not allow_permutation:
        raise ParameterError(
            "Parameter splitting needs |alpha| > |beta| and |gamma| < |delta|; "
            f"got {params.model_dump()} (set allow_permutation for other orderings)"
        )
    tolerance = settings.probability_tolerance
    branches = [root(make_partial(params))]
    details: Dict = {"permutations": []}

    if abs(g - d) > tolerance:
        if min(g, d) == 0.0:
            raise ParameterError("The spatial mode is a product state; there is nothing to concentrate")
        flipped = g > d
        reflection = min(g, d) / max(g, d)
        if flipped:
            details["permutations"].append("a1<->a2 (A)")
            branches = evolve(branches, local_op(ElementKind.SIGMA_X_SPATIAL, "A")[1])
        branches = evolve(branches, lambda s: ubs_split(s, "A", reflection))
        branches = expand(branches, lambda s: measure_levels(
            s, ("A", DofKind.SPATIAL), [("A:a1|a2", [0, 1]), ("A:a3", [2])]))
        branches = keep(branches, lambda br: br.outcome[-1] != "A:a3")
        if flipped:
            branches = evolve(branches, local_op(ElementKind.SIGMA_X_SPATIAL, "A")[1])
        details["reflection"] = reflection

    if abs(a - b) > tolerance:
        if min(a, b) == 0.0:
            raise ParameterError("The polarization is a product state; there is nothing to concentrate")
        cos_theta = min(a, b) / max(a, b)
        sin_theta = math.sqrt(1.0 - cos_theta ** 2)
        if a > b:
            through = np.diag([cos_theta, 1.0])
            primed = np.array([[0.0, 0.0], [sin_theta, 0.0]])
        else:
            details["permutations"].append("H<->V (A)")
            through = np.diag([1.0, cos_theta])
            primed = np.array([[0.0, sin_theta], [0.0, 0.0]])
        branches = expand(branches, lambda s: measure_kraus(
            s, [("A", DofKind.POLARIZATION)], [("A:a", through), ("A:a'", primed)]))
        branches = keep(branches, lambda br: br.outcome[-1] != "A:a'")
        details["theta"] = math.acos(cos_theta)

    def sign_fix(branch: Branch):
        ops = []
        if _opposite_signs(params.alpha, params.beta):
            ops.append(local_op(ElementKind.SIGMA_Z_POL, "A"))
        if _opposite_signs(params.gamma, params.delta):
            ops.append(local_op(ElementKind.SIGMA_Z_SPATIAL, "A"))
        return ops

    branches = correct(branches, sign_fix)
    return _finish("ecp-param-split", branches, make_hyper_bell(PHI_PHI), details)


def ecp_schmidt_linear(params: PartialHyperParams) -> ProtocolReport:
    """Concentration with unknown parameters from two identical pairs AB and CD using linear optics"""
    state = product(make_partial(params, ("A", "B")), make_partial(params, ("C", "D")))
    branches = [root(state)]
    for photon in ("C", "D"):
        branches = evolve(branches, local_op(ElementKind.SIGMA_X_POL, photon)[1])
    branches = expand(branches, lambda s: pbs_parity_check(s, "A", "C"))
    branches = keep(branches, lambda br: br.outcome[-1].endswith("=even"))
    branches = expand(branches, lambda s: bs_hom_parity(s, "B", "D"))
    branches = keep(branches, lambda br: br.outcome[-1].endswith("=odd"))
    branches = evolve(branches, lambda s: hadamard_both(hadamard_both(s, "C"), "D"))
    branches = expand(branches, lambda s: detect(s, "C"))
    branches = expand(branches, lambda s: detect(s, "D"))
    branches = correct(branches, pair_feed_forward("C", "D", "B"))
    return _finish("ecp-schmidt", branches, make_hyper_bell(PHI_PHI), {})


def _flags(pol_done: bool, spat_done: bool) -> str:
    return f"pol={'done' if pol_done else 'open'},spat={'done' if spat_done else 'open'}"


def _qnd_round(state) -> List[Branch]:
    """One round on AB and an identical copy CD; C and D are consumed"""
    copy = relabel(state, {"A": "C", "B": "D"})
    branches = [root(product(state, copy))]
    branches = expand(branches, lambda s: xkerr_parity_pol(s, "A", "C"))
    branches = expand(branches, lambda s: xkerr_parity_spatial(s, "B", "D"))
    branches = evolve(branches, lambda s: hadamard_both(hadamard_both(s, "C"), "D"))
    branches = expand(branches, lambda s: detect(s, "C"))
    branches = expand(branches, lambda s: detect(s, "D"))
    return correct(branches, pair_feed_forward("C", "D", "B"))


def ecp_qnd_iterative(params: PartialHyperParams, rounds: int = 1) -> ProtocolReport:
    """Iterative concentration with cross-Kerr parity checks.

    A DOF is done once its parity check reads odd (unshifted). Pairs with an open
    DOF keep their improved residual state and are paired with an identical copy
    in the next round.
    """
    if rounds < 1:
        raise ParameterError(f"rounds must be >= 1, got {rounds}")
    families: List[Tuple[Branch, bool, bool]] = [(root(make_partial(params)), False, False)]
    leaves: List[Branch] = []
    breakdown = []
    for round_number in range(1, rounds + 1):
        successes: Dict[str, float] = {}
        residual: Dict[Tuple, Tuple[Branch, bool, bool]] = {}
        for family, pol_done, spat_done in families:
            start = _flags(pol_done, spat_done)
            won: List[Branch] = []
            for child in _qnd_round(family.state):
                pol_now = pol_done or child.token("P-QND(A,C)=") == ProbeClass.UNSHIFTED.value
                spat_now = spat_done or child.token("S-QND(B,D)=") == ProbeClass.UNSHIFTED.value
                probability = family.probability * child.probability
                if probability < settings.zero_branch_threshold:
                    continue
                child = child.model_copy(update={
                    "probability": probability,
                    "corrections": family.corrections + child.corrections,
                })
                if pol_now and spat_now:
                    won.append(child)
                    continue
                flags = _flags(pol_now, spat_now)
                key = (flags, fingerprint(child.state))
                if key in residual:
                    merged, _, _ = residual[key]
                    merged = merged.model_copy(update={"probability": merged.probability + probability})
                    residual[key] = (merged, pol_now, spat_now)
                else:
                    token = f"round={round_number}:{flags}"
                    residual[key] = (child.model_copy(update={"outcome": family.outcome + (token,)}),
                                     pol_now, spat_now)
            token = f"round={round_number}:success"
            for leaf in coarse_grain(won, lambda br: token):
                leaves.append(leaf.model_copy(update={"outcome": family.outcome + (token,)}))
                successes[start] = successes.get(start, 0.0) + leaf.probability
        families = list(residual.values())
        breakdown.append({
            "round": round_number,
            "success": sum(successes.values()),
            "success_by_family": successes,
            "residual": _sum_by_flags(families),
        })
        logger.debug(f"Iterative QND round {round_number}: {breakdown[-1]}")

    for family, _, _ in families:
        leaves.append(family.model_copy(update={"accepted": False}))
    details = {"rounds": breakdown, "total_by_round": _cumulative(breakdown)}
    return _finish("ecp-qnd-iterative", leaves, make_hyper_bell(PHI_PHI), details)


def _sum_by_flags(families) -> Dict[str, float]:
    totals: Dict[str, float] = {}
    for family, pol_done, spat_done in families:
        flags = _flags(pol_done, spat_done)
        totals[flags] = totals.get(flags, 0.0) + family.probability
    return totals


def _cumulative(breakdown) -> List[float]:
    totals, running = [], 0.0
    for entry in breakdown:
        running += entry["success"]
        totals.append(running)
    return totals


# detector pair (C, D) after the Hadamards -> corrections on B
TIMEBIN_TABLE: Dict[Tuple[str, str], Tuple[ElementKind, ...]] = {
    ("H", "H"): (),
    ("H", "V"): (ElementKind.SIGMA_Z_TIMEBIN, ElementKind.SIGMA_Z_POL),
    ("V", "H"): (ElementKind.SIGMA_Z_POL,),
    ("V", "V"): (ElementKind.SIGMA_Z_TIMEBIN,),
}


def _timebin_feed_forward(branch: Branch):
    pol_c, arrival_c = clicks(branch, "C")
    pol_d, arrival_d = clicks(branch, "D")
    kinds = list(TIMEBIN_TABLE[(pol_c, pol_d)])
    if (arrival_c == "middle-") != (arrival_d == "middle-"):
        if ElementKind.SIGMA_Z_TIMEBIN in kinds:
            kinds.remove(ElementKind.SIGMA_Z_TIMEBIN)
        else:
            kinds.append(ElementKind.SIGMA_Z_TIMEBIN)
    return [local_op(kind, "B") for kind in kinds]


def _timebin_label(state) -> str:
    """Which of the four (HH +- VV)(SS +- LL) states the pair AB is in"""
    for pol in (BellLabel.PHI_PLUS, BellLabel.PHI_MINUS):
        for time in (BellLabel.PHI_PLUS, BellLabel.PHI_MINUS):
            label = HyperBellLabel(pol=pol, spat=time)
            if fidelity(state, make_timebin_hyper_bell(label)) > 1.0 - settings.probability_tolerance:
                return str(label)
    return "other"


def ecp_timebin(params: TimeBinParams) -> ProtocolReport:
    """Concentration of polarization/time-bin hyperentanglement from two identical pairs"""
    state = product(make_partial_timebin(params, ("A", "B")), make_partial_timebin(params, ("C", "D")))
    branches = [root(state)]
    for photon in ("C", "D"):
        branches = evolve(branches, local_op(ElementKind.SIGMA_X_POL, photon)[1])
        branches = evolve(branches, local_op(ElementKind.SIGMA_X_TIMEBIN, photon)[1])
    branches = expand(branches, lambda s: pbs_parity_check(s, "A", "C"))
    branches = keep(branches, lambda br: br.outcome[-1].endswith("=even"))
    branches = evolve(branches, lambda s: pockels(pockels(s, "B", "L"), "D", "L"))
    branches = expand(branches, lambda s: pbs_parity_check(s, "B", "D"))
    branches = keep(branches, lambda br: br.outcome[-1].endswith("=even"))
    branches = evolve(branches, lambda s: pockels(s, "B", "L"))
    for photon in ("C", "D"):
        branches = evolve(branches, lambda s, p=photon: hadamard_pol(unbalanced_interferometer(s, p), p))
    arrival_kinds = (DofKind.POLARIZATION, DofKind.ARRIVAL)
    branches = expand(branches, lambda s: detect(s, "C", arrival_kinds, resolve_ports=True))
    branches = expand(branches, lambda s: detect(s, "D", arrival_kinds, resolve_ports=True))
    branches = keep(branches, lambda br: all(arrival_class(clicks(br, p)[1]) == "middle" for p in ("C", "D")))

    table: Dict[str, Dict] = {}
    for branch in branches:
        if not branch.accepted:
            continue
        (pol_c, arrival_c), (pol_d, arrival_d) = clicks(branch, "C"), clicks(branch, "D")
        if arrival_c == arrival_d == "middle+":
            table[f"{pol_c}{pol_d}"] = {
                "state": _timebin_label(branch.state),
                "corrections": [str(element(kind)) for kind in TIMEBIN_TABLE[(pol_c, pol_d)]],
            }
    branches = correct(branches, _timebin_feed_forward)
    target = make_timebin_hyper_bell(PHI_PHI)
    return _finish("ecp-timebin", branches, target, {"table": table})
