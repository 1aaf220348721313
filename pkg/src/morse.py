"""SLOCC tangent spaces and Morse indices of critical points."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from .config import get_settings
from .errors import InvalidInputError
from .local_algebra import lifted_generators
from .logging_utils import get_logger
from .momentum import momentum, momentum_norm_sq, momentum_operator, total_variance
from .states import PureState, random_sl_elements, slocc_perturb

if TYPE_CHECKING:
    from .critical_search import CriticalPoint

logger = get_logger(__name__)

# psi counts as inside g.psi when its complement component is below this
MEMBERSHIP_TOL = 1e-8


@dataclass(frozen=True)
class TangentSpace:
    """Orthonormal columns spanning g.psi and its orthogonal complement."""

    basis: np.ndarray = field(repr=False)
    complement: np.ndarray = field(repr=False)

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def complement_dim(self) -> int:
        return self.complement.shape[1]


@dataclass(frozen=True)
class MorseAnalysis:
    index: int
    marginal_directions: int
    complement_dim: int
    eigenvalues: Tuple[float, ...] = ()


def _unit(psi: PureState) -> np.ndarray:
    return psi.amplitudes / np.sqrt(psi.norm_sq)


def tangent_slocc(psi: PureState, rank_tol: Optional[float] = None) -> TangentSpace:
    rank_tol = get_settings().rank_tol if rank_tol is None else rank_tol
    # complex span of O_i psi already contains the i * O_i psi directions
    images = lifted_generators(psi.descriptor).images(_unit(psi))
    u, singular, _ = np.linalg.svd(images, full_matrices=True)
    rank = 0
    if singular.size and singular[0] > 0:
        rank = int(np.sum(singular > rank_tol * singular[0]))
    return TangentSpace(basis=u[:, :rank], complement=u[:, rank:])


def _orthogonal_to_state(space: TangentSpace, vec: np.ndarray) -> np.ndarray:
    """Complement basis with psi projected out when psi is not in g.psi."""
    complement = space.complement
    if complement.shape[1] == 0:
        return complement
    coords = complement.conj().T @ vec
    if np.linalg.norm(coords) <= MEMBERSHIP_TOL:
        return complement
    return complement @ null_space(coords.conj()[None, :])


def morse_analysis(
    cp: "CriticalPoint",
    index_tol: Optional[float] = None,
    rank_tol: Optional[float] = None,
    criticality_tol: Optional[float] = None,
) -> MorseAnalysis:
    settings = get_settings()
    index_tol = settings.index_tol if index_tol is None else index_tol
    criticality_tol = settings.criticality_tol if criticality_tol is None else criticality_tol
    psi = cp.state
    if cp.branch == "zero_momentum" or momentum_norm_sq(psi) < criticality_tol ** 2:
        return MorseAnalysis(index=0, marginal_directions=0, complement_dim=0)

    vec = _unit(psi)
    space = tangent_slocc(psi, rank_tol)
    complement = _orthogonal_to_state(space, vec)
    if complement.shape[1] == 0:
        return MorseAnalysis(index=0, marginal_directions=0, complement_dim=0)

    alpha = momentum_operator(momentum(psi), psi.descriptor)
    compressed = complement.conj().T @ (alpha @ complement - cp.lam * complement)
    eigenvalues = np.linalg.eigvalsh((compressed + compressed.conj().T) / 2)
    negative = int(np.sum(eigenvalues < -index_tol))
    marginal = int(np.sum(np.abs(eigenvalues) <= index_tol))
    if marginal:
        logger.warning(
            "Marginal Hessian directions at critical point",
            extra={
                "extra_data": {
                    "system": psi.descriptor.label,
                    "lambda": cp.lam,
                    "marginal_directions": 2 * marginal,
                }
            },
        )
    return MorseAnalysis(
        index=2 * negative,
        marginal_directions=2 * marginal,
        complement_dim=complement.shape[1],
        eigenvalues=tuple(float(e) for e in eigenvalues),
    )


def morse_index(
    cp: "CriticalPoint", index_tol: Optional[float] = None, criticality_tol: Optional[float] = None
) -> int:
    """Twice the number of negative eigenvalues of alpha - lambda on the complement of g.psi."""
    return morse_analysis(cp, index_tol=index_tol, criticality_tol=criticality_tol).index


def rayleigh(alpha, vec: np.ndarray) -> float:
    return float(np.real(np.vdot(vec, alpha @ vec)) / np.real(np.vdot(vec, vec)))


def hessian_fd_samples(
    cp: "CriticalPoint",
    directions: int = 8,
    h: float = 1e-4,
    seed: int = 0,
    explicit: Optional[Sequence[np.ndarray]] = None,
) -> List[Tuple[float, float]]:
    """(analytic, finite difference) second derivatives of the Rayleigh quotient along complement directions."""
    if not 1e-6 <= h <= 1e-3:
        raise InvalidInputError(f"finite-difference step must lie in [1e-6, 1e-3], got {h}")
    psi = cp.state
    vec = _unit(psi)
    alpha = momentum_operator(momentum(psi), psi.descriptor)
    if explicit is not None:
        vectors = [np.asarray(v, dtype=np.complex128) for v in explicit]
    else:
        complement = _orthogonal_to_state(tangent_slocc(psi), vec)
        if complement.shape[1] == 0:
            return []
        rng = np.random.default_rng(seed)
        vectors = []
        for _ in range(directions):
            coords = rng.standard_normal(complement.shape[1]) + 1j * rng.standard_normal(complement.shape[1])
            vectors.append(complement @ coords)

    samples = []
    center = rayleigh(alpha, vec)
    for v in vectors:
        v = v / np.linalg.norm(v)
        analytic = 2 * float(np.real(np.vdot(v, alpha @ v))) - 2 * cp.lam
        fd = (rayleigh(alpha, vec + h * v) - 2 * center + rayleigh(alpha, vec - h * v)) / (h * h)
        samples.append((analytic, fd))
    return samples


def hessian_fd_check(
    cp: "CriticalPoint",
    directions: int = 8,
    h: float = 1e-4,
    seed: int = 0,
    explicit: Optional[Sequence[np.ndarray]] = None,
) -> float:
    """Max |fd - analytic| / max(|analytic|, 1) over the sampled directions."""
    samples = hessian_fd_samples(cp, directions=directions, h=h, seed=seed, explicit=explicit)
    return max((abs(fd - analytic) / max(abs(analytic), 1.0) for analytic, fd in samples), default=0.0)


def orbit_maximum_excess(psi: PureState, samples: int = 100, eps: float = 0.05, seed: int = 0) -> float:
    """Largest Var gain over random SLOCC perturbations exp(eps * Y) psi."""
    rng = np.random.default_rng(seed)
    base = total_variance(psi)
    excess = -np.inf
    for _ in range(samples):
        elems = [y / np.linalg.norm(y) for y in random_sl_elements(psi.descriptor, rng)]
        excess = max(excess, total_variance(slocc_perturb(psi, elems, eps)) - base)
    return float(excess)


def nonlocal_gain(psi: PureState, direction: np.ndarray, eps: float = 0.05) -> float:
    """Var(psi + eps * v) - Var(psi) for unit psi and unit v."""
    v = np.asarray(direction, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    moved = psi.with_amplitudes(_unit(psi) + eps * v)
    return total_variance(moved) - total_variance(psi)
