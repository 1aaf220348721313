"""su(N) generator bases, their lift to the system space, and the Casimir constant."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from .config import get_settings
from .errors import CrossCheckError, InvalidInputError, ShapeMismatchError
from .hilbert import get_space
from .logging_utils import get_logger
from .models import ParticleKind, SystemDescriptor
from .states import dimension

logger = get_logger(__name__)

CASIMIR_CHECK_TOL = 1e-10


@dataclass(frozen=True)
class AlgebraBasis:
    """Hilbert-Schmidt orthonormal basis of traceless Hermitian N x N matrices."""

    local_dim: int
    generators: Tuple[np.ndarray, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.generators)

    def orthonormality_residual(self) -> float:
        stacked = np.array(self.generators)
        gram = np.einsum("aij,bij->ab", stacked.conj(), stacked)
        return float(np.max(np.abs(gram - np.eye(len(self.generators)))))


def gell_mann_basis(n: int) -> AlgebraBasis:
    """Generalized Gell-Mann matrices normalized to tr(X_i X_j) = delta_ij."""
    if n < 2:
        raise InvalidInputError(f"su(N) needs N >= 2, got {n}")
    symmetric, antisymmetric, diagonal = [], [], []
    for j in range(n):
        for k in range(j + 1, n):
            sym = np.zeros((n, n), dtype=np.complex128)
            sym[j, k] = sym[k, j] = 1 / np.sqrt(2)
            symmetric.append(sym)
            anti = np.zeros((n, n), dtype=np.complex128)
            anti[j, k] = -1j / np.sqrt(2)
            anti[k, j] = 1j / np.sqrt(2)
            antisymmetric.append(anti)
    for m in range(1, n):
        diag = np.zeros(n, dtype=np.complex128)
        diag[:m] = 1
        diag[m] = -m
        diagonal.append(np.diag(diag / np.sqrt(m * (m + 1))))
    generators = tuple(symmetric + antisymmetric + diagonal)
    for generator in generators:
        generator.setflags(write=False)
    return AlgebraBasis(local_dim=n, generators=generators)


@dataclass(frozen=True)
class LiftedObservableSet:
    """Generators acting on the system space.

    Distinguishable systems get one operator per (site, generator); identical
    particles get one derivation per generator. Dense matrices exist only up to
    the configured dimension cap; above it operators are applied implicitly.
    """

    descriptor: SystemDescriptor
    basis: AlgebraBasis = field(repr=False)
    # (momentum component, generator index) per lifted operator
    slots: Tuple[Tuple[int, int], ...]
    matrices: Optional[Tuple[np.ndarray, ...]] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.slots)

    @property
    def is_dense(self) -> bool:
        return self.matrices is not None

    def apply(self, index: int, vec: np.ndarray) -> np.ndarray:
        if self.matrices is not None:
            return self.matrices[index] @ vec
        component, generator = self.slots[index]
        space = get_space(self.descriptor)
        return space.apply_component(vec, component, self.basis.generators[generator])

    def images(self, vec: np.ndarray) -> np.ndarray:
        """Matrix whose columns are O_i |vec>."""
        return np.column_stack([self.apply(index, vec) for index in range(len(self))])

    def matrix(self, index: int) -> np.ndarray:
        if self.matrices is not None:
            return self.matrices[index]
        component, generator = self.slots[index]
        return get_space(self.descriptor).component_matrix(component, self.basis.generators[generator])


def lift_observables(
    basis: AlgebraBasis, descriptor: SystemDescriptor, dense_cap: Optional[int] = None
) -> LiftedObservableSet:
    if basis.local_dim != descriptor.local_dim:
        raise ShapeMismatchError(
            f"generators are {basis.local_dim}x{basis.local_dim}, system has N={descriptor.local_dim}"
        )
    cap = get_settings().dense_operator_cap if dense_cap is None else dense_cap
    slots = tuple(
        (component, generator)
        for component in range(descriptor.num_components)
        for generator in range(len(basis))
    )
    matrices = None
    if dimension(descriptor) <= cap:
        space = get_space(descriptor)
        matrices = tuple(
            space.component_matrix(component, basis.generators[generator])
            for component, generator in slots
        )
    return LiftedObservableSet(descriptor=descriptor, basis=basis, slots=slots, matrices=matrices)


@lru_cache(maxsize=32)
def lifted_generators(descriptor: SystemDescriptor) -> LiftedObservableSet:
    """Cached lift of the Gell-Mann basis, shared by the momentum and Morse modules."""
    return lift_observables(gell_mann_basis(descriptor.local_dim), descriptor)


def casimir_closed_form(descriptor: SystemDescriptor) -> Fraction:
    n, l = descriptor.local_dim, descriptor.num_particles
    if descriptor.kind is ParticleKind.distinguishable:
        return Fraction(l * (n * n - 1), n)
    if descriptor.kind is ParticleKind.fermionic:
        return Fraction(l * (n - l) * (n + 1), n)
    return Fraction(l * (n - 1) * (n + l), n)


def apply_casimir(lifted: LiftedObservableSet, vec: np.ndarray) -> np.ndarray:
    out = np.zeros_like(vec, dtype=np.complex128)
    for index in range(len(lifted)):
        out += lifted.apply(index, lifted.apply(index, vec))
    return out


@lru_cache(maxsize=32)
def casimir_constant(descriptor: SystemDescriptor) -> float:
    """Scalar c with sum_i X_i^2 = c * I, measured on two basis vectors and checked against theory."""
    lifted = lifted_generators(descriptor)
    dim = dimension(descriptor)
    second = int(np.random.default_rng(get_settings().default_seed).integers(dim))
    values: List[float] = []
    for position in sorted({0, second}):
        basis_vec = np.zeros(dim, dtype=np.complex128)
        basis_vec[position] = 1.0
        image = apply_casimir(lifted, basis_vec)
        value = float(image[position].real)
        residual = float(np.linalg.norm(image - value * basis_vec))
        if residual > CASIMIR_CHECK_TOL:
            raise CrossCheckError(
                f"Casimir operator is not scalar on basis vector {position} of {descriptor.label}",
                deviation=residual,
            )
        values.append(value)
    expected = float(casimir_closed_form(descriptor))
    deviation = max(abs(value - expected) for value in values)
    if deviation > CASIMIR_CHECK_TOL:
        logger.error(
            "Casimir check disagrees with closed form",
            extra={"extra_data": {"system": descriptor.label, "measured": values, "closed_form": expected}},
        )
        raise CrossCheckError(
            f"Casimir check {values} disagrees with closed form {expected} for {descriptor.label}",
            deviation=deviation,
        )
    return values[0]


def casimir_operator(descriptor: SystemDescriptor) -> np.ndarray:
    lifted = lifted_generators(descriptor)
    return sum(lifted.matrix(index) @ lifted.matrix(index) for index in range(len(lifted)))


def generators_as_entries(basis: AlgebraBasis) -> List[List[List[dict]]]:
    return [
        [[{"re": float(value.real), "im": float(value.imag)} for value in row] for row in generator]
        for generator in basis.generators
    ]
