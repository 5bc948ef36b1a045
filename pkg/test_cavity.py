"""
Tests for the QD-cavity spin-photon interface and the modules built on it
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from hyperent.exceptions import StateError
from hyperent.models import BasisTag, BellLabel, DofKind, HyperBellLabel
from hyperent.optics import CavityParams, dof_swap, parity_readout, phase_readout, prepare_spins, ps_parity_qnd
from hyperent.optics import ps_qnd, qd_coefficients, qd_scatter_ideal, qsjm_spatial
from hyperent.optics.cavity import cavity_limits, scatter_matrix
from hyperent.protocols import get_protocol
from hyperent.protocols.states import make_hyper_bell
from hyperent.state import PureState, equal_up_to_phase, fidelity, photon, product, register

EVEN = (BellLabel.PHI_PLUS, BellLabel.PHI_MINUS)
PLUS = (BellLabel.PHI_PLUS, BellLabel.PSI_PLUS)


def _circular(carrier="A"):
    return register(photon(carrier, DofKind.SPATIAL, BasisTag.CIRCULAR))


def test_cold_cavity_transmits():
    r, t = qd_coefficients(CavityParams(g=0.0, kappa=1.0))
    assert abs(r) < 1e-12
    assert t == pytest.approx(-1.0)


def test_coupled_cavity_reflects():
    r, t = qd_coefficients(CavityParams(g=2.0, kappa=1.0, gamma=0.1))
    assert t == pytest.approx(-0.05 / 4.05, abs=1e-12)
    assert t.real == pytest.approx(-0.0123456790, abs=1e-9)
    assert r.real == pytest.approx(0.98765432, abs=1e-8)


@pytest.mark.parametrize("params", [
    CavityParams(g=0.5, kappa=1.0, kappa_s=0.2, gamma=0.1, omega=0.3),
    CavityParams(g=1.5, kappa=2.0, gamma=0.05, omega=-0.7, omega_c=0.1, omega_x=0.2),
])
def test_reflection_is_one_plus_transmission(params):
    r, t, r0, t0 = cavity_limits(params)
    assert abs(r - 1 - t) < 1e-12
    assert abs(r0 - 1 - t0) < 1e-12


def test_invalid_cavity_params():
    with pytest.raises(ValidationError):
        CavityParams(g=1.0, kappa=0.0)
    with pytest.raises(ValidationError):
        CavityParams(g=-1.0, kappa=1.0)


def test_scatter_matrix_is_unitary():
    matrix = scatter_matrix()
    assert np.allclose(matrix.conj().T @ matrix, np.eye(8))


def test_scatter_needs_circular_polarization():
    state = prepare_spins(PureState.basis_state(register(photon("A")), ["H", "a1"]), "e")
    with pytest.raises(StateError):
        qd_scatter_ideal(state, "A", "e")


def test_scatter_rule_for_spin_down():
    state = prepare_spins(PureState.basis_state(_circular(), ["R", "a2"]), "e", vector=np.array([0, 1]))
    scattered = qd_scatter_ideal(state, "A", "e")
    expected = prepare_spins(PureState.basis_state(_circular(), ["R", "a1"]), "e", vector=np.array([0, 1]))
    assert np.allclose(scattered.amplitudes, -expected.amplitudes)


@pytest.mark.parametrize("label", HyperBellLabel.all(), ids=str)
def test_double_parity_check_is_deterministic_on_bell_states(label):
    state = make_hyper_bell(label, polarization_basis=BasisTag.CIRCULAR)
    branches = ps_parity_qnd(state, "A", "B", "e1", "e2")
    assert len(branches) == 1
    pol, spat = parity_readout(branches[0], "e1", "e2")
    assert (pol == "even") == (label.pol in EVEN)
    assert (spat == "even") == (label.spat in EVEN)
    assert equal_up_to_phase(branches[0].state, state)


@pytest.mark.parametrize("label", HyperBellLabel.all(), ids=str)
def test_phase_check_reads_both_relative_phases(label):
    state = make_hyper_bell(label, polarization_basis=BasisTag.CIRCULAR)
    branches = ps_qnd(state, "A", "B", "e1", "e2")
    assert len(branches) == 1
    pol, spat = phase_readout(branches[0], "e1", "e2")
    assert pol == ("0" if label.pol in PLUS else "pi")
    assert spat == ("0" if label.spat in PLUS else "pi")
    assert equal_up_to_phase(branches[0].state, state)


def test_dof_swap_exchanges_qubits():
    layout = _circular()
    swapped = dof_swap(PureState.basis_state(layout, ["R", "a2"]), "A")
    assert equal_up_to_phase(swapped, PureState.basis_state(layout, ["L", "a1"]))
    unchanged = dof_swap(PureState.basis_state(layout, ["L", "a2"]), "A")
    assert equal_up_to_phase(unchanged, PureState.basis_state(layout, ["L", "a2"]))


@pytest.mark.parametrize("alpha, gamma", [(0.6, 0.8), (1.0, 0.0), (0.28, 0.96)])
def test_state_joining_moves_polarization(alpha, gamma):
    beta, delta = np.sqrt(1 - alpha ** 2), np.sqrt(1 - gamma ** 2)
    report = get_protocol("qsjm").run({"alpha": alpha, "beta": beta, "gamma": gamma, "delta": delta})
    assert report.success
    assert sum(b.probability for b in report.branches) == pytest.approx(1.0)
    assert all(value == pytest.approx(1.0) for value in report.details["branch_fidelities"].values())


rate = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)
detuning = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


@settings(max_examples=1000)
@given(rate, st.floats(min_value=0.1, max_value=10.0), rate, rate, detuning, detuning, detuning)
def test_reflection_identity_holds_everywhere(g, kappa, kappa_s, gamma, omega, omega_c, omega_x):
    params = CavityParams(g=g, kappa=kappa, kappa_s=kappa_s, gamma=gamma,
                          omega=omega, omega_c=omega_c, omega_x=omega_x)
    r, t = qd_coefficients(params)
    assert abs(r - 1 - t) < 1e-12
    assert abs(t) <= 1.0 + 1e-12


def _photon_state(carrier, pol, spatial):
    return PureState.from_amplitudes(_circular(carrier), np.kron(pol, spatial), normalize=True)


def test_spatial_joining_moves_the_path_state():
    source = _photon_state("A", [0.6, 0.8], [0.28, 0.96])
    target = _photon_state("B", [0.8, 0.6], [np.sqrt(0.5), np.sqrt(0.5)])
    branches = qsjm_spatial(product(source, target), "A", "B", "e")
    expected = _photon_state("B", [0.8, 0.6], [0.28, 0.96])
    keys = [("B", DofKind.POLARIZATION), ("B", DofKind.SPATIAL)]
    assert sum(b.probability for b in branches) == pytest.approx(1.0)
    for branch in branches:
        assert fidelity(branch.state, expected, keys) == pytest.approx(1.0), branch.key
