"""Two-step hyperentanglement purification with QD-cavity parity checks and state joining.

Pairs live in the circular polarization basis. The first step compares two pairs
in both DOFs at once and sorts them into four cases; the second step joins the
good polarization of a case-3 pair with the good spatial mode of a case-4 pair.
"""
import logging
from typing import Dict, List, Optional, Tuple, Union

from hyperent.analysis import closed_forms
from hyperent.config import settings
from hyperent.exceptions import ParameterError
from hyperent.models import BellLabel, DofKind, HyperBellLabel
from hyperent.optics.cavity import ps_qnd, qsjm
from hyperent.optics.linear import detect, hadamard_both, hadamard_pol, hadamard_spatial
from hyperent.protocols.base_protocol import ProtocolReport, collect_corrections
from hyperent.protocols.concentration import pair_feed_forward
from hyperent.protocols.states import classify_hyper_bell, dof_fidelities, make_hyper_bell, make_mixed
from hyperent.state import Branch, Ensemble, PureState, correct, evolve, expand, fidelity, from_weighted
from hyperent.state import keep, mix, product, relabel, root

logger = logging.getLogger(__name__)

PAIR_FAMILY = {
    DofKind.POLARIZATION: (BellLabel.PHI_PLUS, BellLabel.PSI_PLUS),
    DofKind.SPATIAL: (BellLabel.PHI_PLUS, BellLabel.PHI_MINUS),
}

PHOTONS = ("A", "B", "C", "D")

# (polarization outcomes agree, spatial outcomes agree) -> case
_CASES = {(True, True): 1, (False, False): 2, (True, False): 3, (False, True): 4}


def _as_ensemble(value: Union[PureState, Ensemble]) -> Ensemble:
    return value if isinstance(value, Ensemble) else mix([(1.0, value)])


def _check_family(rho: Ensemble, carriers: Tuple[str, str]) -> None:
    if rho.layout.carriers() != list(carriers):
        raise ParameterError(f"Expected a pair on carriers {carriers}, got {rho.layout.carriers()}")
    for index, (weight, member) in enumerate(rho.members):
        label = classify_hyper_bell(member, carriers)
        if label is None:
            raise ParameterError(f"Member {index} (weight {weight:.6g}) of {carriers} is not a hyper-Bell state")
        if label.pol not in PAIR_FAMILY[DofKind.POLARIZATION] or label.spat not in PAIR_FAMILY[DofKind.SPATIAL]:
            raise ParameterError(
                f"Member {index} {label} (weight {weight:.6g}) is outside the supported error family: "
                "bit flips in polarization and phase flips in the spatial mode"
            )


def epp_case(branch: Branch) -> int:
    pol_same = branch.token("eA1=") == branch.token("eB1=")
    spat_same = branch.token("eA2=") == branch.token("eB2=")
    return _CASES[(pol_same, spat_same)]


def _on_all(operation):
    def apply(state: PureState) -> PureState:
        for name in PHOTONS:
            state = operation(state, name)
        return state
    return apply


def _ensemble_output(branches: List[Branch]) -> Optional[Ensemble]:
    members = [(b.probability, b.state) for b in branches if b.accepted]
    return from_weighted(members).merged() if members else None


def hyper_epp_step1(rho_ab: Union[PureState, Ensemble], rho_cd: Union[PureState, Ensemble]) -> ProtocolReport:
    """Compare pairs AB and CD in both DOFs and keep cases 1, 3 and 4"""
    rho_ab, rho_cd = _as_ensemble(rho_ab), _as_ensemble(rho_cd)
    _check_family(rho_ab, ("A", "B"))
    _check_family(rho_cd, ("C", "D"))
    branches = []
    for i, (w1, s1) in enumerate(rho_ab.members):
        for j, (w2, s2) in enumerate(rho_cd.members):
            branches.append(root(product(s1, s2), w1 * w2, member=i * len(rho_cd.members) + j))

    branches = evolve(branches, _on_all(hadamard_pol))
    branches = expand(branches, lambda s: ps_qnd(s, "A", "C", "eA1", "eA2"))
    branches = expand(branches, lambda s: ps_qnd(s, "B", "D", "eB1", "eB2"))
    branches = evolve(branches, _on_all(hadamard_both))
    branches = [b.model_copy(update={"outcome": b.outcome + (f"case-{epp_case(b)}",)}) for b in branches]
    branches = keep(branches, lambda b: b.outcome[-1] != "case-2")
    branches = evolve(branches, lambda s: hadamard_both(hadamard_both(s, "C"), "D"))
    branches = expand(branches, lambda s: detect(s, "C"))
    branches = expand(branches, lambda s: detect(s, "D"))
    branches = correct(branches, pair_feed_forward("C", "D", "B"))

    case_probabilities = {f"case-{k}": 0.0 for k in (1, 2, 3, 4)}
    for branch in branches:
        case = next(token for token in branch.outcome if token.startswith("case-"))
        case_probabilities[case] += branch.probability

    outputs: Dict[str, Ensemble] = {}
    fidelities: Dict[str, Tuple[float, float]] = {}
    for case in ("case-1", "case-3", "case-4"):
        output = _ensemble_output([b for b in branches if case in b.outcome])
        if output is not None:
            outputs[case] = output
            fidelities[case] = dof_fidelities(output, ("A", "B"))
    logger.info(f"Purification step one: {case_probabilities}")
    kept = [case for case in ("case-1", "case-3", "case-4") if case in outputs]
    return ProtocolReport(
        protocol="hyper-epp-step1",
        success=kept[0] if kept else False,
        output=outputs.get("case-1"),
        outputs=outputs,
        corrections=collect_corrections(branches),
        branches=branches,
        success_probability=sum(b.probability for b in branches if b.accepted),
        details={"case_probabilities": case_probabilities, "fidelities": fidelities},
    )


def hyper_epp_step2(
    first: Union[PureState, Ensemble],
    second: Union[PureState, Ensemble],
    first_case: int = 3,
    second_case: int = 4,
) -> ProtocolReport:
    """Join the good polarization of the case-3 pair with the good spatial mode of the case-4 pair.

    Both pairs come in on carriers A and B; the second is renamed to A', B' for
    the run. The surviving pair is returned on A and B.
    """
    if sorted((first_case, second_case)) != [3, 4]:
        raise ParameterError(f"Step two needs one case-3 and one case-4 pair, got cases {first_case} and {second_case}")
    first, second = _as_ensemble(first), _as_ensemble(second)
    for rho in (first, second):
        if rho.layout.carriers() != ["A", "B"]:
            raise ParameterError(f"Step two takes pairs on carriers A and B, got {rho.layout.carriers()}")
    primed = second.map(lambda s: relabel(s, {"A": "A'", "B": "B'"}))
    if first_case == 3:
        sources, targets = ("A", "B"), ("A'", "B'")
    else:
        sources, targets = ("A'", "B'"), ("A", "B")

    branches = []
    for i, (w1, s1) in enumerate(first.members):
        for j, (w2, s2) in enumerate(primed.members):
            branches.append(root(product(s1, s2), w1 * w2, member=i * len(primed.members) + j))
    for source, target, electron in zip(sources, targets, ("eA", "eB")):
        branches = expand(branches, lambda s, src=source, tgt=target, e=electron: qsjm(s, src, tgt, e))
    for source in sources:
        branches = expand(branches, lambda s, src=source: detect(s, src, (DofKind.SPATIAL,)))
    if first_case == 3:
        branches = evolve(branches, lambda s: relabel(s, {"A'": "A", "B'": "B"}))

    output = _ensemble_output(branches)
    pol, spat = dof_fidelities(output, ("A", "B"))
    target_state = make_hyper_bell(HyperBellLabel(pol=BellLabel.PHI_PLUS, spat=BellLabel.PHI_PLUS),
                                   polarization_basis=output.layout.label("A", DofKind.POLARIZATION).basis)
    return ProtocolReport(
        protocol="hyper-epp-step2",
        success=True,
        output=output,
        corrections=collect_corrections(branches),
        branches=branches,
        success_probability=sum(b.probability for b in branches),
        details={"fidelities": (pol, spat), "fidelity": fidelity(output, target_state)},
    )


def _check_fidelity(name: str, value: float) -> None:
    if not 0.5 < value <= 1.0:
        raise ParameterError(f"{name} must lie in (1/2, 1] for purification to help, got {value}")


def _back_to_family(rho: Ensemble) -> Ensemble:
    """Spatial bit flips become phase flips again for the next round"""
    return rho.map(lambda s: hadamard_spatial(hadamard_spatial(s, "A"), "B"))


def hyper_epp_full(f1: float, f2: float, rounds: int = 1, verify: bool = False) -> ProtocolReport:
    """Fidelity trajectory over the given rounds and the efficiencies with and without step two.

    With verify, every round is also enumerated from the mixed input and checked
    against the closed forms.
    """
    _check_fidelity("F1", f1)
    _check_fidelity("F2", f2)
    if rounds < 1:
        raise ParameterError(f"rounds must be >= 1, got {rounds}")
    trajectory = {
        "polarization": closed_forms.fidelity_trajectory(f1, rounds),
        "spatial": closed_forms.fidelity_trajectory(f2, rounds),
    }
    y0 = closed_forms.epp_efficiency_y0(f1, f2)
    y, formula = closed_forms.epp_efficiency_y(f1, f2)
    details = {"trajectory": trajectory, "Y0": y0, "Y": y, "Y_formula": formula}

    if verify:
        details["enumerated"] = _enumerate_rounds(f1, f2, rounds)
        deviations = [entry["max_deviation"] for entry in details["enumerated"]]
        details["verified"] = max(deviations) < settings.probability_tolerance
    logger.info(f"Purification F1={f1}, F2={f2}: final fidelities "
                f"{trajectory['polarization'][-1]:.12f}, {trajectory['spatial'][-1]:.12f}")
    return ProtocolReport(
        protocol="hyper-epp",
        success=details.get("verified", True),
        success_probability=y0,
        details=details,
    )


def _enumerate_rounds(f1: float, f2: float, rounds: int) -> List[Dict]:
    rho = make_mixed(f1, f2)
    current = (f1, f2)
    entries = []
    for round_number in range(1, rounds + 1):
        report = hyper_epp_step1(rho, rho.map(lambda s: relabel(s, {"A": "C", "B": "D"})))
        cases = closed_forms.epp_case_probabilities(*current)
        expected = (closed_forms.purified_fidelity(current[0]), closed_forms.purified_fidelity(current[1]))
        enumerated = report.details["fidelities"]["case-1"]
        probability = report.details["case_probabilities"]["case-1"]
        entry = {
            "round": round_number,
            "case_1_probability": probability,
            "fidelities": enumerated,
            "max_deviation": max(
                abs(probability - cases["case-1"]),
                abs(enumerated[0] - expected[0]),
                abs(enumerated[1] - expected[1]),
            ),
        }
        if round_number == 1:
            recovered = min(report.details["case_probabilities"]["case-3"],
                            report.details["case_probabilities"]["case-4"])
            entry["Y"] = probability + recovered
            entry["max_deviation"] = max(entry["max_deviation"],
                                         abs(entry["Y"] - closed_forms.epp_efficiency_y(f1, f2)[0]))
        entries.append(entry)
        logger.debug(f"Enumerated purification round {round_number}: {entry}")
        rho = _back_to_family(report.outputs["case-1"])
        current = expected
    return entries
