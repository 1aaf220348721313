"""Pure states and the state-space operations shared by every other module."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, List, Mapping, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from .errors import InvalidInputError, ShapeMismatchError
from .hilbert import HilbertSpace, get_space
from .models import ParticleKind, SystemDescriptor

MatrixArg = np.ndarray | Sequence[np.ndarray]


@dataclass(frozen=True)
class PureState:
    """Nonzero amplitude vector over the canonical basis; the ray is the physical state.

    The vector is stored read-only and is never renormalized behind the caller's back.
    """

    descriptor: SystemDescriptor
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        expected = dimension(self.descriptor)
        if amps.shape[0] != expected:
            raise ShapeMismatchError(
                f"{self.descriptor.label} needs {expected} amplitudes, got {amps.shape[0]}"
            )
        if not np.all(np.isfinite(amps)):
            raise InvalidInputError("amplitudes must be finite")
        if float(np.vdot(amps, amps).real) <= 0.0:
            raise InvalidInputError("zero vector")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def space(self) -> HilbertSpace:
        return get_space(self.descriptor)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "PureState":
        return PureState(self.descriptor, self.amplitudes / np.sqrt(self.norm_sq))

    def scaled(self, factor: complex) -> "PureState":
        return PureState(self.descriptor, self.amplitudes * factor)

    def with_amplitudes(self, amplitudes: np.ndarray) -> "PureState":
        return PureState(self.descriptor, amplitudes)

    def nonzero_entries(self, cutoff: float = 1e-14) -> List[Tuple[Tuple[int, ...], complex]]:
        basis = self.space.basis
        return [
            (basis[pos], complex(self.amplitudes[pos]))
            for pos in np.flatnonzero(np.abs(self.amplitudes) > cutoff)
        ]

    @classmethod
    def from_labels(
        cls, descriptor: SystemDescriptor, entries: Mapping[Tuple[int, ...], complex]
    ) -> "PureState":
        space = get_space(descriptor)
        amps = np.zeros(space.dim, dtype=np.complex128)
        for labels, value in entries.items():
            amps[space.position(labels)] += value
        return cls(descriptor, amps)


def dimension(descriptor: SystemDescriptor) -> int:
    n, l = descriptor.local_dim, descriptor.num_particles
    if descriptor.kind is ParticleKind.distinguishable:
        return n ** l
    if descriptor.kind is ParticleKind.bosonic:
        return comb(n + l - 1, l)
    return comb(n, l)


def basis_enumerate(descriptor: SystemDescriptor) -> List[Tuple[int, ...]]:
    return list(get_space(descriptor).basis)


def basis_state(descriptor: SystemDescriptor, labels: Sequence[int]) -> PureState:
    return PureState.from_labels(descriptor, {tuple(labels): 1.0})


def _same_system(psi: PureState, phi: PureState) -> None:
    if psi.descriptor != phi.descriptor:
        raise ShapeMismatchError(
            f"states live in different systems: {psi.descriptor.label} vs {phi.descriptor.label}"
        )


def inner_product(psi: PureState, phi: PureState) -> complex:
    _same_system(psi, phi)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def per_component(descriptor: SystemDescriptor, ops: MatrixArg) -> List[np.ndarray]:
    """Normalize a per-site list / single matrix argument to one matrix per momentum component."""
    space = get_space(descriptor)
    if isinstance(ops, np.ndarray) and ops.ndim == 2:
        if not descriptor.indistinguishable:
            raise ShapeMismatchError(
                f"distinguishable systems need {descriptor.num_particles} matrices, one per site"
            )
        return [space.check_matrix(ops)]
    matrices = [space.check_matrix(op) for op in ops]
    if len(matrices) != descriptor.num_components:
        raise ShapeMismatchError(
            f"expected {descriptor.num_components} matrices for {descriptor.label}, got {len(matrices)}"
        )
    return matrices


def apply_local(psi: PureState, ops: MatrixArg) -> PureState:
    """Group action A_1 x ... x A_L (or A x ... x A for identical particles)."""
    matrices = per_component(psi.descriptor, ops)
    return PureState(psi.descriptor, psi.space.apply_group(psi.amplitudes, matrices))


def apply_algebra_element(psi: PureState, elems: MatrixArg) -> np.ndarray:
    """Leibniz action sum_k X^(k) psi.

    Returns the raw image vector: the image may be zero, which is not a valid PureState.
    """
    matrices = per_component(psi.descriptor, elems)
    return psi.space.apply_derivation(psi.amplitudes, matrices)


def random_state(descriptor: SystemDescriptor, seed: int | Sequence[int]) -> PureState:
    rng = np.random.default_rng(seed)
    size = dimension(descriptor)
    amps = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)
    return PureState(descriptor, amps / np.linalg.norm(amps))


def random_sl_elements(
    descriptor: SystemDescriptor, rng: np.random.Generator
) -> List[np.ndarray]:
    """One random complex traceless matrix per momentum component (an element of g)."""
    n = descriptor.local_dim
    elems = []
    for _ in range(descriptor.num_components):
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        elems.append(m - np.trace(m) / n * np.eye(n))
    return elems


def slocc_perturb(psi: PureState, elems: Iterable[np.ndarray], eps: float) -> PureState:
    """Apply exp(eps * Y_k) on every component; the result stays in the SLOCC class of psi."""
    return apply_local(psi, [expm(eps * np.asarray(y)) for y in elems])
