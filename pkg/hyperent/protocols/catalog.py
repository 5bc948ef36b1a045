"""Runnable protocols exposed to the command line"""
import logging
import math
from typing import List, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from hyperent.analysis import curves
from hyperent.config import settings
from hyperent.exceptions import ParameterError
from hyperent.models import BasisTag, BellLabel, CurveTable, DofKind, HyperBellLabel, PartialHyperParams
from hyperent.models import TimeBinParams
from hyperent.optics.cavity import qsjm
from hyperent.protocols import bell_analysis, concentration, gates, purification
from hyperent.protocols.base_protocol import BaseProtocol, ProtocolReport, collect_corrections, register_protocol
from hyperent.protocols.states import make_hyper_bell, make_mixed
from hyperent.state import PureState, fidelity, from_weighted, photon, product, register, relabel

logger = logging.getLogger(__name__)

SQRT_HALF = 1.0 / math.sqrt(2.0)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HbsaParameters(_Strict):
    pol: BellLabel = BellLabel.PHI_PLUS
    spat: BellLabel = BellLabel.PHI_PLUS


class AmplitudeParameters(_Strict):
    alpha: float = SQRT_HALF
    beta: float = SQRT_HALF
    gamma: float = SQRT_HALF
    delta: float = SQRT_HALF

    def partial(self) -> PartialHyperParams:
        return PartialHyperParams(alpha=self.alpha, beta=self.beta, gamma=self.gamma, delta=self.delta)


class ParamSplitParameters(AmplitudeParameters):
    allow_permutation: bool = False


class IterativeParameters(AmplitudeParameters):
    rounds: int = Field(default=1, ge=1)


class TimeBinParameters(_Strict):
    alpha: float = SQRT_HALF
    beta: float = SQRT_HALF
    delta: float = SQRT_HALF
    eta: float = SQRT_HALF


class NoParameters(_Strict):
    pass


class MixedPairParameters(_Strict):
    F1: float = 0.8
    F2: float = 0.8
    error_model: str = "bitflip-phaseflip"


class JoinParameters(_Strict):
    F1: float = 0.8
    F2: float = 0.8
    first_case: int = 3
    second_case: int = 4


class PurificationParameters(_Strict):
    F1: float = 0.8
    F2: float = 0.8
    rounds: int = Field(default=1, ge=1)
    verify: bool = False


class CnotParameters(_Strict):
    levels: List[str] = Field(default_factory=lambda: ["L", "a2", "R", "b1"])


class JoiningParameters(_Strict):
    alpha: float = SQRT_HALF
    beta: float = SQRT_HALF
    gamma: float = SQRT_HALF
    delta: float = SQRT_HALF


class EcpCurveParameters(_Strict):
    alpha_sq: List[float] = Field(default_factory=lambda: [round(0.05 * k, 2) for k in range(1, 20)])
    rounds: List[int] = Field(default_factory=lambda: [1, 2, 3])


class EppCurveParameters(_Strict):
    F: Union[float, List[float]] = 0.8
    rounds: Union[int, List[int]] = 3


class EppEfficiencyParameters(_Strict):
    F: List[float] = Field(default_factory=lambda: [round(0.55 + 0.05 * k, 2) for k in range(10)])


@register_protocol
class HbsaProtocol(BaseProtocol):
    name = "hbsa"
    topic = "hyper-Bell analysis with cross-Kerr parity checks"
    anchor = "§3.2, Eqs. 14-20"
    parameters_model = HbsaParameters

    def _run(self, parameters: HbsaParameters) -> ProtocolReport:
        _, report = bell_analysis.hbsa(make_hyper_bell(HyperBellLabel(pol=parameters.pol, spat=parameters.spat)))
        return report


@register_protocol
class TeleportProtocol(BaseProtocol):
    name = "teleport"
    topic = "hyper-teleportation of a two-qubit photon state"
    anchor = "§3.3, Eq. 21"
    parameters_model = AmplitudeParameters

    def _run(self, parameters: AmplitudeParameters) -> ProtocolReport:
        return bell_analysis.teleport(parameters.partial())


@register_protocol
class SwapProtocol(BaseProtocol):
    name = "swap"
    topic = "hyperentanglement swapping"
    anchor = "§3.4, Eqs. 22-23"
    parameters_model = NoParameters

    def _run(self, parameters: NoParameters) -> ProtocolReport:
        return bell_analysis.swap()


@register_protocol
class ParamSplitProtocol(BaseProtocol):
    name = "ecp-param-split"
    topic = "concentration by parameter splitting (known amplitudes)"
    anchor = "§4.2, Eqs. 24-29"
    parameters_model = ParamSplitParameters

    def _run(self, parameters: ParamSplitParameters) -> ProtocolReport:
        return concentration.ecp_param_split(parameters.partial(), parameters.allow_permutation)


@register_protocol
class SchmidtProtocol(BaseProtocol):
    name = "ecp-schmidt"
    topic = "concentration by Schmidt projection with linear optics"
    anchor = "§4.3.1, Eqs. 30-35"
    parameters_model = AmplitudeParameters

    def _run(self, parameters: AmplitudeParameters) -> ProtocolReport:
        return concentration.ecp_schmidt_linear(parameters.partial())


@register_protocol
class IterativeProtocol(BaseProtocol):
    name = "ecp-qnd-iterative"
    topic = "iterative concentration with cross-Kerr parity checks"
    anchor = "§4.3.2, Eqs. 36-48"
    parameters_model = IterativeParameters

    def _run(self, parameters: IterativeParameters) -> ProtocolReport:
        return concentration.ecp_qnd_iterative(parameters.partial(), parameters.rounds)


@register_protocol
class TimeBinProtocol(BaseProtocol):
    name = "ecp-timebin"
    topic = "concentration of polarization and time-bin hyperentanglement"
    anchor = "§4.4, Eqs. 49-57, Table 1"
    parameters_model = TimeBinParameters

    def _run(self, parameters: TimeBinParameters) -> ProtocolReport:
        return concentration.ecp_timebin(TimeBinParams(**parameters.model_dump()))


def _mixed_pairs(f1: float, f2: float, error_model: str = "bitflip-phaseflip"):
    rho = make_mixed(f1, f2, error_model)
    return rho, rho.map(lambda s: relabel(s, {"A": "C", "B": "D"}))


@register_protocol
class PurifyStepOneProtocol(BaseProtocol):
    name = "hyper-epp-step1"
    topic = "purification, parity comparison in both DOFs"
    anchor = "§5.2, Eqs. 68-75"
    parameters_model = MixedPairParameters

    def _run(self, parameters: MixedPairParameters) -> ProtocolReport:
        return purification.hyper_epp_step1(*_mixed_pairs(parameters.F1, parameters.F2, parameters.error_model))


@register_protocol
class PurifyStepTwoProtocol(BaseProtocol):
    name = "hyper-epp-step2"
    topic = "purification, joining case-3 and case-4 pairs"
    anchor = "§5.2, second step"
    parameters_model = JoinParameters

    def _run(self, parameters: JoinParameters) -> ProtocolReport:
        first = purification.hyper_epp_step1(*_mixed_pairs(parameters.F1, parameters.F2))
        outputs = first.outputs
        wanted = [f"case-{parameters.first_case}", f"case-{parameters.second_case}"]
        missing = [case for case in wanted if case not in outputs]
        if missing:
            raise ParameterError(f"Step one produced no {', '.join(missing)} pair at F1={parameters.F1}, F2={parameters.F2}")
        return purification.hyper_epp_step2(outputs[wanted[0]], outputs[wanted[1]],
                                            parameters.first_case, parameters.second_case)


@register_protocol
class PurifyProtocol(BaseProtocol):
    name = "hyper-epp"
    topic = "two-step purification: fidelity per round and efficiencies"
    anchor = "§5.2, Eqs. 76-77"
    parameters_model = PurificationParameters

    def _run(self, parameters: PurificationParameters) -> ProtocolReport:
        return purification.hyper_epp_full(parameters.F1, parameters.F2, parameters.rounds, parameters.verify)


def _circular_photon(carrier: str, pol, spatial) -> PureState:
    layout = register(photon(carrier, DofKind.SPATIAL, BasisTag.CIRCULAR))
    return PureState.from_amplitudes(layout, np.kron(pol, spatial), normalize=True)


@register_protocol
class CnotProtocol(BaseProtocol):
    name = "hyper-cnot"
    topic = "hyper-CNOT gate with two cavity spins"
    anchor = "§6, Eqs. 78-82"
    parameters_model = CnotParameters

    def _run(self, parameters: CnotParameters) -> ProtocolReport:
        layout = gates.two_photon_layout()
        report = gates.hyper_cnot(PureState.basis_state(layout, parameters.levels))
        pa, sa, pb, sb = (label.level_index(level) for label, level in zip(layout.labels, parameters.levels))
        expected = [parameters.levels[0], parameters.levels[1],
                    layout.labels[2].levels[pb ^ pa], layout.labels[3].levels[sb ^ sa]]
        details = dict(report.details)
        details["expected"] = expected
        details["fidelity"] = fidelity(report.output, PureState.basis_state(layout, expected))
        return report.model_copy(update={"details": details})


@register_protocol
class JoiningProtocol(BaseProtocol):
    name = "qsjm"
    topic = "state joining: polarization of A onto photon B through a cavity spin"
    anchor = "§5.2, Eqs. 61-65"
    parameters_model = JoiningParameters

    def _run(self, parameters: JoiningParameters) -> ProtocolReport:
        source = _circular_photon("A", [parameters.alpha, parameters.beta], [SQRT_HALF, SQRT_HALF])
        target = _circular_photon("B", [SQRT_HALF, SQRT_HALF], [parameters.gamma, parameters.delta])
        branches = qsjm(product(source, target), "A", "B", "e")
        expected = _circular_photon("B", [parameters.alpha, parameters.beta], [parameters.gamma, parameters.delta])
        fidelities = {b.key: fidelity(b.state, expected, [("B", DofKind.POLARIZATION), ("B", DofKind.SPATIAL)])
                      for b in branches}
        output = from_weighted([(b.probability, b.state) for b in branches]).merged()
        return ProtocolReport(
            protocol=self.name,
            success=min(fidelities.values()) > 1.0 - settings.probability_tolerance,
            output=output.members[0][1] if len(output.members) == 1 else output,
            corrections=collect_corrections(branches),
            branches=branches,
            success_probability=sum(b.probability for b in branches),
            details={"branch_fidelities": fidelities},
        )


@register_protocol
class EcpCurve(BaseProtocol):
    name = "ecp-curve"
    topic = "iterative concentration: success probability against |alpha|^2 per round count"
    anchor = "§4.3.2, Fig. 14"
    parameters_model = EcpCurveParameters
    produces = "table"

    def _run(self, parameters: EcpCurveParameters) -> CurveTable:
        return curves.curve_ecp_iteration(parameters.alpha_sq, parameters.rounds)


@register_protocol
class EppCurve(BaseProtocol):
    name = "epp-curve"
    topic = "purification: fidelity against rounds (scalar F) or against F per round count"
    anchor = "§5.2, Fig. 17"
    parameters_model = EppCurveParameters
    produces = "table"

    def _run(self, parameters: EppCurveParameters) -> CurveTable:
        if isinstance(parameters.F, list):
            rounds = parameters.rounds if isinstance(parameters.rounds, list) else list(range(1, parameters.rounds + 1))
            return curves.curve_epp_fidelity(parameters.F, rounds)
        rounds = max(parameters.rounds) if isinstance(parameters.rounds, list) else parameters.rounds
        return curves.epp_trajectory(parameters.F, rounds)


@register_protocol
class EppEfficiencyCurve(BaseProtocol):
    name = "epp-efficiency-curve"
    topic = "purification efficiency with and without state joining against F"
    anchor = "§5.2, Fig. 18, Eqs. 76-77"
    parameters_model = EppEfficiencyParameters
    produces = "table"

    def _run(self, parameters: EppEfficiencyParameters) -> CurveTable:
        return curves.curve_epp_efficiency(parameters.F)

