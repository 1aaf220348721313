import numpy as np
import pytest
from scipy.sparse.linalg import LinearOperator
from scipy.stats import unitary_group

from src import momentum as momentum_module
from src.catalog import THREE_QUBITS, WEDGE_3_5, entry
from src.config import Settings
from src.errors import CrossCheckError, ShapeMismatchError
from src.models import ParticleKind, SystemDescriptor
from src.momentum import (
    DensityMatrix,
    MomentumValue,
    apply_momentum_value,
    casimir_expectation,
    momentum,
    momentum_norm_sq,
    momentum_operator,
    summarize,
    total_variance,
    variance_paths,
)
from src.states import apply_local, random_state
from src.verify import IDENTITY_SYSTEMS


@pytest.mark.parametrize(
    "name, var, norm_sq",
    [
        ("GHZ", 9 / 2, 0.0),
        ("W", 13 / 3, 1 / 6),
        ("BS1", 4.0, 1 / 2),
        ("SEP", 3.0, 3 / 2),
        ("psi1", 6.0, 6 / 5),
        ("psi2", 7.0, 1 / 5),
    ],
)
def test_catalog_variances(name, var, norm_sq):
    psi = entry(name).state()
    assert total_variance(psi) == pytest.approx(var, abs=1e-10)
    assert momentum_norm_sq(psi) == pytest.approx(norm_sq, abs=1e-10)


def test_w_spectra():
    for spectrum in momentum(entry("W").state()).spectra():
        assert np.allclose(spectrum, [1 / 6, -1 / 6])


def test_fermionic_trace_form_reference_values():
    psi1 = summarize(entry("psi1").state())
    psi2 = summarize(entry("psi2").state())
    assert psi2.hs_norm_sq == pytest.approx(1 / 45, abs=1e-12)
    assert psi1.casimir_minus_hs_norm_sq == pytest.approx(106 / 15, abs=1e-10)
    assert psi2.casimir_minus_hs_norm_sq == pytest.approx(323 / 45, abs=1e-10)
    assert psi2.casimir == pytest.approx(36 / 5)
    assert np.allclose(psi2.spectra[0], [2 / 15, -1 / 30, -1 / 30, -1 / 30, -1 / 30])


def test_variance_ignores_normalization():
    psi = entry("W").state()
    assert total_variance(psi.scaled(3.0 - 4.0j)) == pytest.approx(13 / 3, abs=1e-10)


@pytest.mark.parametrize("descriptor", IDENTITY_SYSTEMS, ids=lambda d: d.label)
def test_variance_identity_on_random_states(descriptor):
    for seed in range(5):
        psi = random_state(descriptor, seed)
        direct, identity = variance_paths(psi)
        assert abs(direct - identity) < 1e-10
        assert casimir_expectation(psi) == pytest.approx(summarize(psi).casimir, abs=1e-10)


def test_variance_is_invariant_under_local_unitaries():
    rng = np.random.default_rng(3)
    psi = random_state(THREE_QUBITS, 2)
    moved = apply_local(psi, [unitary_group.rvs(2, random_state=rng) for _ in range(3)])
    assert total_variance(moved) == pytest.approx(total_variance(psi), abs=1e-10)

    fermions = random_state(WEDGE_3_5, 2)
    moved = apply_local(fermions, unitary_group.rvs(5, random_state=rng))
    assert total_variance(moved) == pytest.approx(total_variance(fermions), abs=1e-10)


def test_separable_state_minimizes_variance():
    sep = total_variance(entry("SEP").state())
    for seed in range(20):
        assert total_variance(random_state(THREE_QUBITS, seed)) >= sep - 1e-10


def test_density_matrix_validation():
    with pytest.raises(CrossCheckError):
        DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(CrossCheckError):
        DensityMatrix(np.diag([0.7, 0.7]))
    with pytest.raises(CrossCheckError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(ShapeMismatchError):
        DensityMatrix(np.ones((2, 3)))
    assert np.allclose(DensityMatrix(np.diag([0.25, 0.75])).spectrum(), [0.75, 0.25])


def test_momentum_value_shape_checks():
    with pytest.raises(ShapeMismatchError):
        MomentumValue(THREE_QUBITS, (np.zeros((2, 2)),))
    with pytest.raises(ShapeMismatchError):
        MomentumValue(WEDGE_3_5, (np.zeros((2, 2)),))
    assert MomentumValue.zero(THREE_QUBITS).hs_norm_sq() == 0.0


def test_momentum_operator_dense_and_implicit_agree(monkeypatch):
    psi = random_state(WEDGE_3_5, 8)
    m = momentum(psi)
    dense = momentum_operator(m, WEDGE_3_5)
    vec = random_state(WEDGE_3_5, 9).amplitudes
    assert isinstance(dense, np.ndarray)
    assert np.allclose(dense @ vec, apply_momentum_value(m, vec))

    monkeypatch.setattr(momentum_module, "get_settings", lambda: Settings(dense_operator_cap=1))
    implicit = momentum_operator(m, WEDGE_3_5)
    assert isinstance(implicit, LinearOperator)
    assert np.allclose(implicit @ vec, dense @ vec)


def test_momentum_operator_rejects_other_system():
    other = SystemDescriptor(kind=ParticleKind.bosonic, local_dim=5, num_particles=3)
    with pytest.raises(ShapeMismatchError):
        momentum_operator(momentum(entry("psi1").state()), other)


@pytest.mark.parametrize("descriptor", IDENTITY_SYSTEMS, ids=lambda d: d.label)
def test_momentum_is_unitarily_equivariant(descriptor):
    rng = np.random.default_rng(17)
    psi = random_state(descriptor, 4)
    n = descriptor.local_dim
    unitaries = [unitary_group.rvs(n, random_state=rng) for _ in range(descriptor.num_components)]
    moved = apply_local(psi, unitaries[0] if descriptor.indistinguishable else unitaries)
    expected = MomentumValue(
        descriptor, tuple(u @ c @ u.conj().T for u, c in zip(unitaries, momentum(psi).components))
    )
    assert momentum(moved).max_residual(expected) < 1e-10
