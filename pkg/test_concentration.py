"""
Tests for the four concentration protocols
"""
import math

import pytest

from hyperent.analysis import closed_forms
from hyperent.exceptions import ParameterError
from hyperent.models import BellLabel, HyperBellLabel, PartialHyperParams, TimeBinParams
from hyperent.optics import ElementKind, element
from hyperent.optics.linear import clicks
from hyperent.protocols import ecp_param_split, ecp_qnd_iterative, ecp_schmidt_linear, ecp_timebin
from hyperent.protocols.states import make_timebin_hyper_bell
from hyperent.state import fidelity

HALF = math.sqrt(0.5)
BALANCED = PartialHyperParams(alpha=HALF, beta=HALF, gamma=HALF, delta=HALF)


def _params(alpha_sq: float, gamma_sq: float) -> PartialHyperParams:
    return PartialHyperParams(alpha=math.sqrt(alpha_sq), beta=math.sqrt(1 - alpha_sq),
                              gamma=math.sqrt(gamma_sq), delta=math.sqrt(1 - gamma_sq))


def test_param_split_example_point():
    report = ecp_param_split(PartialHyperParams(alpha=0.8, beta=0.6, gamma=0.6, delta=0.8))
    assert report.success_probability == pytest.approx(0.5184, abs=1e-9)
    assert report.details["fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert report.details["reflection"] == pytest.approx(0.75)
    assert report.details["theta"] == pytest.approx(math.acos(0.75))
    discarded = {b.outcome[-1] for b in report.branches if not b.accepted}
    assert discarded == {"A:a3", "A:a'"}


@pytest.mark.parametrize("alpha_sq", [0.55, 0.7, 0.9])
@pytest.mark.parametrize("gamma_sq", [0.1, 0.3, 0.45])
def test_param_split_matches_closed_form(alpha_sq, gamma_sq):
    p = _params(alpha_sq, gamma_sq)
    report = ecp_param_split(p)
    expected = closed_forms.param_split_probability(p.alpha, p.beta, p.gamma, p.delta)
    assert report.success_probability == pytest.approx(expected, abs=1e-9)
    assert report.details["fidelity"] == pytest.approx(1.0, abs=1e-9)


def test_param_split_ordering():
    swapped = PartialHyperParams(alpha=0.6, beta=0.8, gamma=0.8, delta=0.6)
    with pytest.raises(ParameterError):
        ecp_param_split(swapped)
    report = ecp_param_split(swapped, allow_permutation=True)
    assert report.success_probability == pytest.approx(0.5184, abs=1e-9)
    assert report.details["fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert len(report.details["permutations"]) == 2


def test_param_split_balanced_is_a_no_op():
    report = ecp_param_split(BALANCED, allow_permutation=True)
    assert report.success_probability == pytest.approx(1.0)
    assert report.details["fidelity"] == pytest.approx(1.0)


def test_param_split_negative_amplitudes_are_corrected():
    report = ecp_param_split(PartialHyperParams(alpha=0.8, beta=-0.6, gamma=0.6, delta=-0.8))
    assert report.details["fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert report.corrections == ["sigmaZ_pol(A)", "sigmaZ_spatial(A)"]


def test_param_split_rejects_product_states():
    with pytest.raises(ParameterError):
        ecp_param_split(PartialHyperParams(alpha=1.0, beta=0.0, gamma=HALF, delta=HALF))


def test_schmidt_balanced():
    report = ecp_schmidt_linear(BALANCED)
    assert report.success_probability == pytest.approx(0.25, abs=1e-9)
    assert report.details["fidelity"] == pytest.approx(1.0, abs=1e-9)


def test_schmidt_unbalanced():
    report = ecp_schmidt_linear(PartialHyperParams(alpha=0.8, beta=0.6, gamma=0.8, delta=0.6))
    assert report.success_probability == pytest.approx(0.21233664, abs=1e-9)
    assert report.details["fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert sum(b.probability for b in report.branches) == pytest.approx(1.0)


def test_qnd_first_round_breakdown():
    p = PartialHyperParams(alpha=0.8, beta=0.6, gamma=0.8, delta=0.6)
    report = ecp_qnd_iterative(p, rounds=1)
    first = report.details["rounds"][0]
    cases = closed_forms.qnd_first_round(p.alpha, p.beta, p.gamma, p.delta)
    assert first["success"] == pytest.approx(cases["p1"], abs=1e-9)
    assert first["residual"]["pol=open,spat=open"] == pytest.approx(0.29073664, abs=1e-9)
    assert first["residual"]["pol=done,spat=open"] == pytest.approx(cases["p1_prime_2"], abs=1e-9)
    assert first["residual"]["pol=open,spat=done"] == pytest.approx(cases["p1_prime_3"], abs=1e-9)
    assert report.details["fidelity"] == pytest.approx(1.0, abs=1e-9)


QND_GRID = [(0.2, 0.2), (0.35, 0.35), (0.3, 0.6)]


@pytest.mark.parametrize("alpha_sq, gamma_sq", QND_GRID)
def test_qnd_first_round_cases(alpha_sq, gamma_sq):
    p = _params(alpha_sq, gamma_sq)
    first = ecp_qnd_iterative(p, rounds=1).details["rounds"][0]
    cases = closed_forms.qnd_first_round(p.alpha, p.beta, p.gamma, p.delta)
    assert first["success"] == pytest.approx(cases["p1"], abs=1e-9)
    assert first["residual"]["pol=open,spat=open"] == pytest.approx(cases["p1_prime_1"], abs=1e-9)
    assert first["residual"]["pol=done,spat=open"] == pytest.approx(cases["p1_prime_2"], abs=1e-9)
    assert first["residual"]["pol=open,spat=done"] == pytest.approx(cases["p1_prime_3"], abs=1e-9)


def test_qnd_balanced_round_one():
    report = ecp_qnd_iterative(BALANCED, rounds=1)
    assert report.success_probability == pytest.approx(0.25, abs=1e-9)


@pytest.mark.parametrize("alpha_sq, gamma_sq", QND_GRID)
def test_qnd_rounds_match_recursion(alpha_sq, gamma_sq):
    p = _params(alpha_sq, gamma_sq)
    report = ecp_qnd_iterative(p, rounds=10)
    totals = report.details["total_by_round"]
    assert len(totals) == 10
    for n, total in enumerate(totals, start=1):
        assert total == pytest.approx(closed_forms.qnd_total_probability(p.alpha, p.beta, p.gamma, p.delta, n), abs=1e-9)
    assert totals == sorted(totals)
    assert report.success_probability == pytest.approx(totals[-1], abs=1e-9)
    assert report.details["fidelity"] == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("alpha_sq, gamma_sq", QND_GRID)
def test_qnd_second_round_from_each_case(alpha_sq, gamma_sq):
    p = _params(alpha_sq, gamma_sq)
    report = ecp_qnd_iterative(p, rounds=2)
    second = report.details["rounds"][1]["success_by_family"]
    expected = closed_forms.qnd_second_round(p.alpha, p.beta, p.gamma, p.delta)
    assert second["pol=open,spat=open"] == pytest.approx(expected["p2_1"], abs=1e-9)
    assert second["pol=done,spat=open"] == pytest.approx(expected["p2_2"], abs=1e-9)
    assert second["pol=open,spat=done"] == pytest.approx(expected["p2_3"], abs=1e-9)
    assert sum(second.values()) == pytest.approx(report.details["rounds"][1]["success"])


def test_qnd_rejects_zero_rounds():
    with pytest.raises(ParameterError):
        ecp_qnd_iterative(BALANCED, rounds=0)


def test_timebin_balanced():
    report = ecp_timebin(TimeBinParams(alpha=HALF, beta=HALF, delta=HALF, eta=HALF))
    assert report.success_probability == pytest.approx(0.0625, abs=1e-9)
    assert report.details["fidelity"] == pytest.approx(1.0, abs=1e-9)
    sigma_t, sigma_p = str(element(ElementKind.SIGMA_Z_TIMEBIN)), str(element(ElementKind.SIGMA_Z_POL))
    assert report.details["table"] == {
        "HH": {"state": "(phi+, phi+)", "corrections": []},
        "HV": {"state": "(phi-, phi-)", "corrections": [sigma_t, sigma_p]},
        "VH": {"state": "(phi-, phi+)", "corrections": [sigma_p]},
        "VV": {"state": "(phi+, phi-)", "corrections": [sigma_t]},
    }
    target = make_timebin_hyper_bell(HyperBellLabel(pol=BellLabel.PHI_PLUS, spat=BellLabel.PHI_PLUS))
    rows = set()
    for branch in report.branches:
        if branch.accepted:
            rows.add(clicks(branch, "C")[0] + clicks(branch, "D")[0])
            assert fidelity(branch.state, target) == pytest.approx(1.0, abs=1e-9), branch.key
    assert rows == {"HH", "HV", "VH", "VV"}


def test_timebin_unbalanced_matches_closed_form():
    params = TimeBinParams(alpha=0.8, beta=0.6, delta=0.6, eta=0.8)
    report = ecp_timebin(params)
    expected = closed_forms.timebin_probability(params.alpha, params.beta, params.delta, params.eta)
    assert report.success_probability == pytest.approx(expected, abs=1e-9)
    assert report.details["fidelity"] == pytest.approx(1.0, abs=1e-9)
