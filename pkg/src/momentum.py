"""Reduced one-particle densities, the momentum map and the total variance."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator

from .config import get_settings
from .errors import CrossCheckError, InvalidInputError, ShapeMismatchError
from .hilbert import get_space
from .local_algebra import casimir_constant, lifted_generators
from .logging_utils import get_logger
from .models import SystemDescriptor
from .states import PureState, dimension

logger = get_logger(__name__)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeMismatchError(f"density matrix must be square, got {m.shape}")
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > HERMITIAN_TOL:
            raise CrossCheckError(f"reduced density is not Hermitian ({herm:.3e})", deviation=herm)
        trace_dev = abs(np.trace(m) - 1.0)
        if trace_dev > TRACE_TOL:
            raise CrossCheckError(f"reduced density has trace off by {trace_dev:.3e}", deviation=trace_dev)
        m = (m + m.conj().T) / 2
        lowest = float(np.linalg.eigvalsh(m)[0])
        if lowest < -PSD_TOL:
            raise CrossCheckError(f"reduced density has eigenvalue {lowest:.3e}", deviation=-lowest)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> np.ndarray:
        """Eigenvalues, non-increasing."""
        return np.linalg.eigvalsh(self.matrix)[::-1]


@dataclass(frozen=True)
class MomentumValue:
    """mu([psi]): one traceless Hermitian component per site, or one for identical particles."""

    descriptor: SystemDescriptor
    components: Tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self) -> None:
        n = self.descriptor.local_dim
        if len(self.components) != self.descriptor.num_components:
            raise ShapeMismatchError(
                f"{self.descriptor.label} has {self.descriptor.num_components} momentum components, "
                f"got {len(self.components)}"
            )
        frozen = []
        for component in self.components:
            c = np.array(component, dtype=np.complex128)
            if c.shape != (n, n):
                raise ShapeMismatchError(f"momentum component must be {n}x{n}, got {c.shape}")
            c.setflags(write=False)
            frozen.append(c)
        object.__setattr__(self, "components", tuple(frozen))

    @classmethod
    def zero(cls, descriptor: SystemDescriptor) -> "MomentumValue":
        n = descriptor.local_dim
        return cls(descriptor, tuple(np.zeros((n, n)) for _ in range(descriptor.num_components)))

    def hs_norm_sq(self) -> float:
        """Plain sum of tr(component^2), without the particle-number weight."""
        return float(sum(np.real(np.trace(c @ c)) for c in self.components))

    def spectra(self) -> List[np.ndarray]:
        return [np.linalg.eigvalsh(c)[::-1] for c in self.components]

    def max_residual(self, other: "MomentumValue") -> float:
        return float(max(np.max(np.abs(a - b)) for a, b in zip(self.components, other.components)))


def _check_site(descriptor: SystemDescriptor, site: int) -> int:
    if descriptor.indistinguishable:
        if site != 1:
            raise InvalidInputError(f"identical particles have a single reduced density (site 1), got {site}")
        return 0
    if not 1 <= site <= descriptor.num_particles:
        raise InvalidInputError(f"site {site} outside 1..{descriptor.num_particles}")
    return site - 1


def reduced_density(psi: PureState, site: int) -> DensityMatrix:
    component = _check_site(psi.descriptor, site)
    return DensityMatrix(psi.space.reduced_density(psi.amplitudes, component))


def momentum(psi: PureState) -> MomentumValue:
    shift = np.eye(psi.descriptor.local_dim) / psi.descriptor.local_dim
    components = tuple(
        reduced_density(psi, site).matrix - shift for site in range(1, psi.descriptor.num_components + 1)
    )
    return MomentumValue(psi.descriptor, components)


def norm_weight(descriptor: SystemDescriptor) -> int:
    """Factor between <X_i> sums over lifted generators and the plain trace form."""
    return descriptor.num_particles ** 2 if descriptor.indistinguishable else 1


def _expectations(psi: PureState) -> Tuple[np.ndarray, np.ndarray]:
    """(<O_i>, <O_i^2>) for every lifted generator, normalized by <psi|psi>."""
    lifted = lifted_generators(psi.descriptor)
    images = lifted.images(psi.amplitudes)
    norm_sq = psi.norm_sq
    first = np.real(psi.amplitudes.conj() @ images) / norm_sq
    second = np.real(np.sum(images.conj() * images, axis=0)) / norm_sq
    return first, second


def momentum_norm_sq(psi: PureState) -> float:
    """||mu||^2 from the generator expectations, cross-checked against the trace form."""
    first, _ = _expectations(psi)
    from_expectations = float(np.sum(first ** 2))
    from_trace = norm_weight(psi.descriptor) * momentum(psi).hs_norm_sq()
    deviation = abs(from_expectations - from_trace)
    if deviation > IDENTITY_TOL:
        raise CrossCheckError(
            f"momentum norm paths disagree: {from_expectations!r} vs {from_trace!r}",
            deviation=deviation,
        )
    return from_expectations


def variance_paths(psi: PureState) -> Tuple[float, float]:
    """(sum of generator variances, c - ||mu||^2), computed independently."""
    first, second = _expectations(psi)
    direct = float(np.sum(second - first ** 2))
    return direct, casimir_constant(psi.descriptor) - momentum_norm_sq(psi)


def casimir_expectation(psi: PureState) -> float:
    """<psi| sum_i O_i^2 |psi> / <psi|psi>."""
    _, second = _expectations(psi)
    return float(np.sum(second))


def total_variance(psi: PureState) -> float:
    """Sum of variances of the lifted generators; checked against c - ||mu||^2."""
    direct, identity = variance_paths(psi)
    deviation = abs(direct - identity)
    if deviation > IDENTITY_TOL:
        logger.error(
            "Variance identity violated",
            extra={"extra_data": {"system": psi.descriptor.label, "direct": direct, "identity": identity}},
        )
        raise CrossCheckError(f"Var = c - ||mu||^2 violated by {deviation:.3e}", deviation=deviation)
    return direct


def apply_momentum_value(m: MomentumValue, vec: np.ndarray) -> np.ndarray:
    return get_space(m.descriptor).apply_derivation(np.asarray(vec, dtype=np.complex128), m.components)


def momentum_operator(m: MomentumValue, descriptor: SystemDescriptor) -> np.ndarray | LinearOperator:
    """mu([psi]) acting on H: dense up to the configured cap, implicit above it."""
    if m.descriptor != descriptor:
        raise ShapeMismatchError(
            f"momentum value of {m.descriptor.label} used on {descriptor.label}"
        )
    dim = dimension(descriptor)
    if dim <= get_settings().dense_operator_cap:
        return get_space(descriptor).derivation_matrix(m.components)
    return LinearOperator(
        (dim, dim),
        matvec=lambda vec: apply_momentum_value(m, np.ravel(vec)),
        rmatvec=lambda vec: apply_momentum_value(m, np.ravel(vec)),
        dtype=np.complex128,
    )


@dataclass(frozen=True)
class VarianceSummary:
    """Every scalar an analysis report needs, computed once."""

    var: float
    casimir: float
    momentum_norm_sq: float
    hs_norm_sq: float
    spectra: List[np.ndarray]

    @property
    def casimir_minus_hs_norm_sq(self) -> float:
        return self.casimir - self.hs_norm_sq


def summarize(psi: PureState) -> VarianceSummary:
    mu = momentum(psi)
    return VarianceSummary(
        var=total_variance(psi),
        casimir=casimir_constant(psi.descriptor),
        momentum_norm_sq=momentum_norm_sq(psi),
        hs_norm_sq=mu.hs_norm_sq(),
        spectra=mu.spectra(),
    )
