"""
Tests for the labeled state core: layouts, pure states, measurements and ensembles
"""
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hyperent.config import Settings
from hyperent.exceptions import StateError, StateSpaceOverflow
from hyperent.models import BellLabel, DofKind
from hyperent.protocols.states import make_bell
from hyperent.state import (
    Branch,
    Ensemble,
    PureState,
    apply_unitary,
    coarse_grain,
    equal_up_to_phase,
    fidelity,
    fingerprint,
    from_weighted,
    measure_levels,
    measure_projective,
    mix,
    photon,
    product,
    reduced_density_matrix,
    register,
    relabel,
    spin,
)

POL_A = ("A", DofKind.POLARIZATION)
POL_B = ("B", DofKind.POLARIZATION)

amplitude = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


def test_layout_order_and_levels():
    layout = register(photon("A") + photon("B"))
    assert [str(label) for label in layout.labels] == ["A.polarization", "A.spatial", "B.polarization", "B.spatial"]
    assert layout.size == 16
    assert layout.label("B", DofKind.SPATIAL).levels == ("b1", "b2")
    assert layout.carriers() == ["A", "B"]


def test_duplicate_subsystem_is_rejected():
    with pytest.raises(StateError):
        register(photon("A") + photon("A"))


def test_state_space_overflow_reports_size():
    labels = []
    for carrier in "ABCDEFGH":
        labels.extend(photon(carrier))
    with pytest.raises(StateSpaceOverflow) as excinfo:
        register(labels)
    assert excinfo.value.dimension == 2 ** 16


def test_unnormalized_state_is_rejected():
    layout = register(photon("A"))
    with pytest.raises(StateError):
        PureState(layout=layout, amplitudes=[1, 1, 0, 0])
    state = PureState.from_amplitudes(layout, [1, 1, 0, 0], normalize=True)
    assert np.isclose(np.linalg.norm(state.amplitudes), 1.0)


def test_basis_state_amplitude_lookup():
    layout = register(photon("A"))
    state = PureState.basis_state(layout, ["V", "a2"])
    assert state.amplitude({POL_A: "V", ("A", DofKind.SPATIAL): "a2"}) == 1.0
    with pytest.raises(StateError):
        PureState.basis_state(layout, ["X", "a1"])


def test_non_unitary_matrix_is_rejected():
    state = PureState.basis_state(register(photon("A")), ["H", "a1"])
    with pytest.raises(StateError):
        apply_unitary(state, [POL_A], np.array([[1, 0], [0, 0.5]]))


def test_product_and_relabel():
    bell = make_bell(BellLabel.PHI_PLUS, DofKind.POLARIZATION)
    copy = relabel(bell, {"A": "C", "B": "D"})
    joint = product(bell, copy)
    assert joint.layout.carriers() == ["A", "B", "C", "D"]
    assert joint.layout.size == 16
    assert np.allclose(copy.amplitudes, bell.amplitudes)


def test_bell_state_has_maximally_mixed_marginal():
    bell = make_bell(BellLabel.PSI_MINUS, DofKind.POLARIZATION)
    assert np.allclose(reduced_density_matrix(bell, [POL_A]), np.eye(2) / 2)
    assert fidelity(bell, bell) == pytest.approx(1.0)


def test_parity_projection_on_bell_states():
    even = np.diag([1, 0, 0, 1]).astype(complex)
    projectors = [("even", even), ("odd", np.eye(4) - even)]
    phi = measure_projective(make_bell(BellLabel.PHI_MINUS, DofKind.POLARIZATION), [POL_A, POL_B], projectors)
    psi = measure_projective(make_bell(BellLabel.PSI_PLUS, DofKind.POLARIZATION), [POL_A, POL_B], projectors)
    assert [(b.outcome, b.probability) for b in phi] == [(("even",), pytest.approx(1.0))]
    assert [b.outcome for b in psi] == [("odd",)]


def test_incomplete_measurement_is_rejected():
    bell = make_bell(BellLabel.PHI_PLUS, DofKind.POLARIZATION)
    with pytest.raises(StateError):
        measure_projective(bell, [POL_A, POL_B], [("even", np.diag([1, 0, 0, 1]).astype(complex))])


def test_single_level_group_removes_subsystem():
    bell = make_bell(BellLabel.PHI_PLUS, DofKind.POLARIZATION)
    branches = measure_levels(bell, POL_A, [("A:H", [0]), ("A:V", [1])])
    assert [b.outcome[0] for b in branches] == ["A:H", "A:V"]
    assert all(b.probability == pytest.approx(0.5) for b in branches)
    assert branches[1].state.layout.carriers() == ["B"]
    assert branches[1].state.amplitude({POL_B: "V"}) == pytest.approx(1.0)


@given(st.lists(amplitude, min_size=4, max_size=4), st.floats(min_value=0, max_value=6.28))
def test_unitaries_preserve_norm_and_branch_sums(values, phase):
    vector = np.array(values, dtype=complex)
    assume(np.linalg.norm(vector) > 1e-3)
    layout = register(photon("A"))
    state = PureState.from_amplitudes(layout, vector, normalize=True)
    rotation = np.array([[np.cos(phase), -np.sin(phase)], [np.sin(phase), np.cos(phase)]])
    rotated = apply_unitary(state, [POL_A], rotation)
    assert np.isclose(np.linalg.norm(rotated.amplitudes), 1.0)
    branches = measure_levels(rotated, ("A", DofKind.SPATIAL), [("A:a1", [0]), ("A:a2", [1])])
    assert sum(b.probability for b in branches) == pytest.approx(1.0)


def test_fingerprint_ignores_global_phase():
    bell = make_bell(BellLabel.PHI_PLUS, DofKind.POLARIZATION)
    rotated = PureState(layout=bell.layout, amplitudes=1j * bell.amplitudes)
    assert fingerprint(bell) == fingerprint(rotated)
    assert equal_up_to_phase(bell, rotated)
    assert not equal_up_to_phase(bell, make_bell(BellLabel.PHI_MINUS, DofKind.POLARIZATION))


def test_coarse_grain_merges_equal_states():
    bell = make_bell(BellLabel.PHI_PLUS, DofKind.POLARIZATION)
    branches = [
        Branch(outcome=("x=0",), probability=0.25, state=bell),
        Branch(outcome=("x=1",), probability=0.75, state=PureState(layout=bell.layout, amplitudes=-bell.amplitudes)),
    ]
    merged = coarse_grain(branches, lambda b: "any")
    assert len(merged) == 1
    assert merged[0].outcome == ("any",)
    assert merged[0].probability == pytest.approx(1.0)


def test_ensemble_weights():
    phi = make_bell(BellLabel.PHI_PLUS, DofKind.POLARIZATION)
    psi = make_bell(BellLabel.PSI_PLUS, DofKind.POLARIZATION)
    rho = mix([(0.8, phi), (0.2, psi)])
    assert rho.weights == [0.8, 0.2]
    assert fidelity(rho, phi) == pytest.approx(0.8)
    assert np.trace(rho.density_matrix()).real == pytest.approx(1.0)
    with pytest.raises(StateError):
        mix([(0.5, phi), (0.2, psi)])
    with pytest.raises(StateError):
        Ensemble(members=((1.2, phi), (-0.2, psi)))


def test_from_weighted_normalizes_and_merges():
    phi = make_bell(BellLabel.PHI_PLUS, DofKind.POLARIZATION)
    rho = from_weighted([(0.1, phi), (0.3, phi)]).merged()
    assert len(rho.members) == 1
    assert rho.members[0][0] == pytest.approx(1.0)


def test_spin_label_levels():
    layout = register([spin("e")])
    assert layout.labels[0].levels == ("up", "down")


def test_settings_read_environment(monkeypatch):
    monkeypatch.setenv("HYPERENT_DEFAULT_SEED", "5")
    monkeypatch.setenv("HYPERENT_MAX_STATE_DIMENSION", "256")
    configured = Settings()
    assert configured.default_seed == 5
    assert configured.max_state_dimension == 256
