"""
Tests for the two-step purification protocol
"""
import pytest

from hyperent.analysis import closed_forms
from hyperent.exceptions import ParameterError
from hyperent.models import BasisTag, BellLabel, HyperBellLabel
from hyperent.protocols import get_protocol, hyper_epp_full, hyper_epp_step1, hyper_epp_step2, make_hyper_bell
from hyperent.protocols.states import make_mixed
from hyperent.state import relabel

F_PRIME = 16 / 17


def _pairs(f1, f2, error_model="bitflip-phaseflip"):
    rho = make_mixed(f1, f2, error_model)
    return rho, rho.map(lambda s: relabel(s, {"A": "C", "B": "D"}))


@pytest.fixture(scope="module")
def step_one():
    return hyper_epp_step1(*_pairs(0.8, 0.8))


def test_mixed_state_fidelities():
    rho = make_mixed(0.8, 0.7)
    assert len(rho.members) == 4
    assert sorted(rho.weights) == pytest.approx(sorted([0.56, 0.24, 0.14, 0.06]))
    assert len(make_mixed(0.8, 0.7, "general").members) == 16
    with pytest.raises(ParameterError):
        make_mixed(0.8, 0.7, "depolarizing")
    with pytest.raises(ParameterError):
        make_mixed(1.2, 0.7)


def test_step_one_case_probabilities(step_one):
    probabilities = step_one.details["case_probabilities"]
    expected = closed_forms.epp_case_probabilities(0.8, 0.8)
    for case in ("case-1", "case-2", "case-3", "case-4"):
        assert probabilities[case] == pytest.approx(expected[case], abs=1e-9)
    assert probabilities["case-1"] == pytest.approx(0.4624, abs=1e-9)
    assert step_one.success == "case-1"
    assert step_one.success_probability == pytest.approx(1 - expected["case-2"], abs=1e-9)


def test_step_one_case_fidelities(step_one):
    fidelities = step_one.details["fidelities"]
    assert fidelities["case-1"] == pytest.approx((F_PRIME, F_PRIME), abs=1e-9)
    assert fidelities["case-3"] == pytest.approx((F_PRIME, 0.5), abs=1e-9)
    assert fidelities["case-4"] == pytest.approx((0.5, F_PRIME), abs=1e-9)


def test_step_one_discards_case_two(step_one):
    discarded = [b for b in step_one.branches if not b.accepted]
    assert discarded
    assert all(b.outcome[-1] == "case-2" for b in discarded)
    assert set(step_one.outputs) == {"case-1", "case-3", "case-4"}


def test_step_one_rejects_unsupported_errors():
    wrong = make_hyper_bell(HyperBellLabel(pol=BellLabel.PSI_MINUS, spat=BellLabel.PHI_PLUS),
                            polarization_basis=BasisTag.CIRCULAR)
    rho_ab, rho_cd = _pairs(0.8, 0.8)
    with pytest.raises(ParameterError, match="Member 0"):
        hyper_epp_step1(wrong, rho_cd)


@pytest.mark.parametrize("first_case, second_case", [(3, 4), (4, 3)])
def test_step_two_recovers_case_one_fidelity(step_one, first_case, second_case):
    first = step_one.outputs[f"case-{first_case}"]
    second = step_one.outputs[f"case-{second_case}"]
    report = hyper_epp_step2(first, second, first_case, second_case)
    assert report.details["fidelities"] == pytest.approx((F_PRIME, F_PRIME), abs=1e-9)
    assert report.details["fidelity"] == pytest.approx(F_PRIME ** 2, abs=1e-9)
    assert report.output.layout.carriers() == ["A", "B"]
    assert report.success_probability == pytest.approx(1.0)


def test_step_two_needs_one_pair_of_each_case(step_one):
    pair = step_one.outputs["case-3"]
    with pytest.raises(ParameterError):
        hyper_epp_step2(pair, pair, 3, 3)


def test_full_protocol_efficiencies():
    report = hyper_epp_full(0.8, 0.8, rounds=3)
    assert report.details["Y0"] == pytest.approx(0.4624, abs=1e-9)
    assert report.details["Y"] == pytest.approx(0.68, abs=1e-9)
    assert report.details["Y_formula"] == "published"
    trajectory = report.details["trajectory"]["polarization"]
    assert trajectory[0] == pytest.approx(F_PRIME, abs=1e-9)
    assert trajectory[-1] > 0.9999
    assert trajectory == sorted(trajectory)


def test_full_protocol_with_unequal_fidelities():
    report = hyper_epp_full(0.7, 0.9)
    assert report.details["Y_formula"] == "extension"
    assert report.details["Y"] >= report.details["Y0"]


def test_full_protocol_verified_by_enumeration():
    report = hyper_epp_full(0.8, 0.8, rounds=2, verify=True)
    assert report.details["verified"]
    assert report.success
    first, second = report.details["enumerated"]
    assert first["case_1_probability"] == pytest.approx(0.4624, abs=1e-9)
    assert first["Y"] == pytest.approx(0.68, abs=1e-9)
    expected = closed_forms.purified_fidelity(F_PRIME)
    assert second["fidelities"] == pytest.approx((expected, expected), abs=1e-9)


@pytest.mark.parametrize("fidelity", [0.5, 0.3, 1.1])
def test_full_protocol_rejects_fidelity_outside_range(fidelity):
    with pytest.raises(ParameterError):
        hyper_epp_full(fidelity, 0.8)


def test_step_two_from_catalog():
    report = get_protocol("hyper-epp-step2").run({"F1": 0.8, "F2": 0.8})
    assert report.details["fidelities"] == pytest.approx((F_PRIME, F_PRIME), abs=1e-9)
