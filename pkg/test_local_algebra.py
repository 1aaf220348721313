from fractions import Fraction

import numpy as np
import pytest

from src.errors import InvalidInputError, ShapeMismatchError
from src.local_algebra import (
    casimir_closed_form,
    casimir_constant,
    casimir_operator,
    gell_mann_basis,
    generators_as_entries,
    lift_observables,
    lifted_generators,
)
from src.models import ParticleKind, SystemDescriptor
from src.states import dimension, random_state


def _system(kind: str, n: int, l: int) -> SystemDescriptor:
    return SystemDescriptor(kind=ParticleKind(kind), local_dim=n, num_particles=l)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_gell_mann_basis_is_orthonormal(n):
    basis = gell_mann_basis(n)
    assert len(basis) == n * n - 1
    assert basis.orthonormality_residual() < 1e-12
    for x in basis.generators:
        assert abs(np.trace(x)) < 1e-12
        assert np.allclose(x, x.conj().T)


def test_gell_mann_qubit_is_scaled_pauli():
    x, y, z = gell_mann_basis(2).generators
    s = np.sqrt(2)
    assert np.allclose(x * s, [[0, 1], [1, 0]])
    assert np.allclose(y * s, [[0, -1j], [1j, 0]])
    assert np.allclose(z * s, [[1, 0], [0, -1]])


def test_gell_mann_rejects_trivial_dimension():
    with pytest.raises(InvalidInputError):
        gell_mann_basis(1)


def test_generators_as_entries_is_row_major():
    entries = generators_as_entries(gell_mann_basis(2))
    assert len(entries) == 3
    assert entries[0][0][1] == {"re": pytest.approx(1 / np.sqrt(2)), "im": 0.0}
    assert entries[1][0][1]["im"] == pytest.approx(-1 / np.sqrt(2))


@pytest.mark.parametrize("system", [("distinguishable", 2, 3), ("fermionic", 5, 3), ("bosonic", 3, 2)])
def test_lifted_observables_are_hermitian_and_commute_with_casimir(system):
    descriptor = _system(*system)
    lifted = lift_observables(gell_mann_basis(descriptor.local_dim), descriptor)
    casimir = casimir_operator(descriptor)
    for index in range(len(lifted)):
        o = lifted.matrix(index)
        assert np.allclose(o, o.conj().T, atol=1e-12)
        assert np.allclose(o @ casimir, casimir @ o, atol=1e-10)


@pytest.mark.parametrize(
    "kind, n, l, expected",
    [
        ("distinguishable", 2, 3, Fraction(9, 2)),
        ("distinguishable", 3, 2, Fraction(16, 3)),
        ("fermionic", 5, 3, Fraction(36, 5)),
        ("bosonic", 3, 3, Fraction(12)),
        ("bosonic", 2, 1, Fraction(3, 2)),
    ],
)
def test_casimir_closed_form(kind, n, l, expected):
    descriptor = _system(kind, n, l)
    assert casimir_closed_form(descriptor) == expected
    assert casimir_constant(descriptor) == pytest.approx(float(expected), abs=1e-10)


@pytest.mark.parametrize("system", [("distinguishable", 2, 2), ("fermionic", 4, 2), ("bosonic", 3, 2)])
def test_casimir_operator_is_scalar(system):
    descriptor = _system(*system)
    c = casimir_constant(descriptor)
    assert np.allclose(casimir_operator(descriptor), c * np.eye(dimension(descriptor)), atol=1e-10)


def test_lift_rejects_wrong_local_dimension():
    with pytest.raises(ShapeMismatchError):
        lift_observables(gell_mann_basis(3), _system("distinguishable", 2, 2))


@pytest.mark.parametrize("system", [("distinguishable", 3, 2), ("fermionic", 5, 3), ("bosonic", 3, 3)])
def test_implicit_lift_matches_dense(system):
    descriptor = _system(*system)
    basis = gell_mann_basis(descriptor.local_dim)
    dense = lift_observables(basis, descriptor)
    implicit = lift_observables(basis, descriptor, dense_cap=0)
    assert dense.is_dense and not implicit.is_dense
    assert len(dense) == descriptor.num_components * len(basis)
    vec = random_state(descriptor, 9).amplitudes
    assert np.allclose(dense.images(vec), implicit.images(vec))
    assert np.allclose(dense.matrix(2), implicit.matrix(2))


def test_lifted_generators_are_cached():
    descriptor = _system("distinguishable", 2, 3)
    assert lifted_generators(descriptor) is lifted_generators(descriptor)
