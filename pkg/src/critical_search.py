"""Criticality tests, alpha_P operators and the polytope sweep for critical states."""
from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from .config import get_settings
from .errors import ShapeMismatchError
from .hilbert import get_space
from .logging_utils import get_logger
from .models import ParticleKind, SystemDescriptor
from .momentum import apply_momentum_value, momentum, momentum_norm_sq, summarize
from .morse import morse_analysis
from .polytope import MembershipPredicate, SpectrumPoint, enumerate_candidates, membership_predicate, spectrum_point
from .sphere_descent import DescentOptions, minimize_on_sphere, random_unit
from .states import PureState, apply_local, dimension

logger = get_logger(__name__)

ZERO_BRANCH_NOTE = "class family, representatives only"
FINGERPRINT_DECIMALS = 6
IDENTITY_TOL = 1e-8
RAYLEIGH_TOL = 1e-10


@dataclass(frozen=True)
class SearchOptions:
    seed: int
    starts: int
    max_iter: int
    step: float
    solver_tol: float
    criticality_tol: float
    index_tol: float
    rank_tol: float
    workers: int = 1

    @classmethod
    def create(cls, **overrides) -> "SearchOptions":
        settings = get_settings()
        values = dict(
            seed=settings.default_seed,
            starts=settings.solver_starts,
            max_iter=settings.solver_max_iter,
            step=settings.solver_step,
            solver_tol=settings.solver_tol,
            criticality_tol=settings.criticality_tol,
            index_tol=settings.index_tol,
            rank_tol=settings.rank_tol,
            workers=settings.sweep_workers,
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def descent(self) -> DescentOptions:
        return DescentOptions(
            starts=self.starts, max_iter=self.max_iter, step=self.step, tol=self.solver_tol
        )


@dataclass(frozen=True)
class CriticalityVerdict:
    critical: bool
    lam: float
    residual: float


@dataclass(frozen=True)
class CriticalPoint:
    state: PureState
    lam: float
    variance: float
    momentum_norm_sq: float
    casimir: float
    hs_norm_sq: float
    spectra: SpectrumPoint
    residual: float
    branch: str = "sweep"
    candidate: Optional[SpectrumPoint] = None
    morse_index: Optional[int] = None
    marginal_directions: Optional[int] = None
    note: Optional[str] = None
    float_spectra: Tuple[Tuple[float, ...], ...] = field(default=(), repr=False)

    @classmethod
    def create(
        cls,
        psi: PureState,
        denominator: int,
        options: SearchOptions,
        branch: str = "sweep",
        candidate: Optional[SpectrumPoint] = None,
    ) -> Optional["CriticalPoint"]:
        """Measure ``psi``; None when it fails the criticality test."""
        verdict = is_critical(psi, options.criticality_tol)
        if not verdict.critical:
            logger.warning(
                "Discarded non-critical solver output",
                extra={"extra_data": {"system": psi.descriptor.label, "residual": verdict.residual}},
            )
            return None
        summary = summarize(psi)
        drift = abs(summary.var + summary.momentum_norm_sq - summary.casimir)
        if drift > IDENTITY_TOL:
            logger.warning("Variance identity drift at critical point", extra={"extra_data": {"drift": drift}})
        point = cls(
            state=psi,
            lam=verdict.lam,
            variance=summary.var,
            momentum_norm_sq=summary.momentum_norm_sq,
            casimir=summary.casimir,
            hs_norm_sq=summary.hs_norm_sq,
            spectra=spectrum_point(psi, denominator),
            residual=verdict.residual,
            branch=branch,
            candidate=candidate,
            note=ZERO_BRANCH_NOTE if branch == "zero_momentum" else None,
            float_spectra=tuple(tuple(float(v) for v in s) for s in summary.spectra),
        )
        analysis = morse_analysis(
            point,
            index_tol=options.index_tol,
            rank_tol=options.rank_tol,
            criticality_tol=options.criticality_tol,
        )
        return dataclasses.replace(
            point, morse_index=analysis.index, marginal_directions=analysis.marginal_directions
        )

    @property
    def casimir_minus_hs_norm_sq(self) -> float:
        return self.casimir - self.hs_norm_sq

    def lambda_rational(self) -> Optional[Fraction]:
        if self.branch == "zero_momentum":
            return Fraction(0)
        if self.candidate is not None:
            return self.candidate.weighted_norm_sq()
        return None

    def fingerprint(self) -> Tuple:
        spectra = tuple(
            tuple(round(value, FINGERPRINT_DECIMALS) + 0.0 for value in spectrum)
            for spectrum in self.float_spectra
        )
        return spectra, round(self.variance, FINGERPRINT_DECIMALS) + 0.0, self.morse_index


@dataclass(frozen=True)
class AlphaOperator:
    """Diagonal of the lifted alpha_P in the canonical basis, exact."""

    point: SpectrumPoint
    diagonal: Tuple[Fraction, ...]


@dataclass(frozen=True)
class EigenGroup:
    value: Fraction
    positions: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.positions)


def build_alpha(p: SpectrumPoint, descriptor: SystemDescriptor) -> AlphaOperator:
    if p.descriptor != descriptor:
        raise ShapeMismatchError(f"spectrum point of {p.descriptor.label} used for {descriptor.label}")
    basis = get_space(descriptor).basis
    if descriptor.indistinguishable:
        spectrum = p.spectra[0]
        diagonal = tuple(sum((spectrum[label - 1] for label in labels), Fraction(0)) for labels in basis)
    else:
        diagonal = tuple(
            sum((p.spectra[site][label - 1] for site, label in enumerate(labels)), Fraction(0))
            for labels in basis
        )
    return AlphaOperator(point=p, diagonal=diagonal)


def eigenspaces(a: AlphaOperator) -> List[EigenGroup]:
    groups: Dict[Fraction, List[int]] = {}
    for position, value in enumerate(a.diagonal):
        groups.setdefault(value, []).append(position)
    return [EigenGroup(value, tuple(groups[value])) for value in sorted(groups, reverse=True)]


def is_critical(psi: PureState, tol: Optional[float] = None) -> CriticalityVerdict:
    tol = get_settings().criticality_tol if tol is None else tol
    vec = psi.amplitudes / np.sqrt(psi.norm_sq)
    image = apply_momentum_value(momentum(psi), vec)
    lam = float(np.real(np.vdot(vec, image)))
    residual = float(np.linalg.norm(image - lam * vec))
    return CriticalityVerdict(critical=residual < tol, lam=lam, residual=residual)


def is_zero_momentum(psi: PureState, tol: Optional[float] = None) -> bool:
    tol = get_settings().criticality_tol if tol is None else tol
    return momentum_norm_sq(psi) < tol * tol


def standardize(psi: PureState) -> Tuple[PureState, List[np.ndarray]]:
    """Rotate every reduced density to a non-increasing diagonal by local unitaries."""
    space = psi.space
    units = []
    for component in range(psi.descriptor.num_components):
        rho = space.reduced_density(psi.amplitudes, component)
        _, vectors = np.linalg.eigh((rho + rho.conj().T) / 2)
        vectors = vectors[:, ::-1]
        # fix each eigenvector's phase: largest-modulus entry real positive
        pivots = np.argmax(np.abs(vectors), axis=0)
        phases = vectors[pivots, np.arange(vectors.shape[1])]
        vectors = vectors * (np.abs(phases) / phases)
        units.append(vectors.conj().T)
    ops = units[0] if psi.descriptor.indistinguishable else units
    return apply_local(psi, ops), units


class MomentumMismatch:
    """g(psi) = sum_k ||mu_k(psi) - T_k||^2 for unit vectors supported on ``support``."""

    def __init__(self, descriptor: SystemDescriptor, support: Sequence[int], targets: Sequence[np.ndarray]) -> None:
        self.descriptor = descriptor
        self.space = get_space(descriptor)
        self.support = np.asarray(support, dtype=int)
        self.targets = [np.asarray(t, dtype=np.complex128) for t in targets]
        self.shift = np.eye(descriptor.local_dim) / descriptor.local_dim
        self.weight = 1.0 / descriptor.num_particles if descriptor.indistinguishable else 1.0

    def embed(self, vec: np.ndarray) -> np.ndarray:
        full = np.zeros(self.space.dim, dtype=np.complex128)
        full[self.support] = vec
        return full

    def _errors(self, full: np.ndarray) -> List[np.ndarray]:
        return [
            self.space.reduced_density(full, k) - self.shift - target
            for k, target in enumerate(self.targets)
        ]

    def value(self, vec: np.ndarray) -> float:
        return float(sum(np.sum(np.abs(e) ** 2) for e in self._errors(self.embed(vec))))

    def residuals(self, vec: np.ndarray) -> np.ndarray:
        errors = self._errors(self.embed(vec))
        return np.concatenate([np.concatenate([e.real.ravel(), e.imag.ravel()]) for e in errors])

    def gradient(self, vec: np.ndarray) -> np.ndarray:
        full = self.embed(vec)
        image = self.space.apply_derivation(full, self._errors(full))
        expectation = np.real(np.vdot(full, image))
        return (4 * self.weight * (image - expectation * full))[self.support]


def _minimize(
    objective: MomentumMismatch, seeds: Sequence[np.random.SeedSequence], options: SearchOptions
) -> List[np.ndarray]:
    descent = options.descent()
    found = []
    for seed in seeds:
        start = random_unit(np.random.default_rng(seed), len(objective.support))
        result = minimize_on_sphere(objective, start, descent)
        if result.converged(options.solver_tol):
            found.append(objective.embed(result.vector))
    return found


def _diagonal_feasible(descriptor: SystemDescriptor, point: SpectrumPoint, group: EigenGroup) -> bool:
    """Can populations on ``group`` reproduce diag(rho_k) = P_k + 1/N at all?"""
    basis = get_space(descriptor).basis
    n = descriptor.local_dim
    rows, rhs = [], []
    for component in range(descriptor.num_components):
        targets = point.eigenvalues(component)
        for orbital in range(1, n + 1):
            if descriptor.indistinguishable:
                row = [basis[pos].count(orbital) / descriptor.num_particles for pos in group.positions]
            else:
                row = [1.0 if basis[pos][component] == orbital else 0.0 for pos in group.positions]
            rows.append(row)
            rhs.append(float(targets[orbital - 1]))
    rows.append([1.0] * len(group))
    rhs.append(1.0)
    result = linprog(
        c=np.zeros(len(group)),
        A_eq=np.array(rows),
        b_eq=np.array(rhs),
        bounds=[(0, None)] * len(group),
        method="highs",
    )
    return result.status == 0


def _dedupe(points: Sequence[CriticalPoint]) -> List[CriticalPoint]:
    seen = set()
    unique = []
    for point in points:
        key = point.fingerprint()
        if key in seen:
            continue
        seen.add(key)
        unique.append(point)
    return unique


def _solve_group(
    point: SpectrumPoint,
    group: EigenGroup,
    candidate_index: int,
    denominator: int,
    options: SearchOptions,
) -> List[CriticalPoint]:
    descriptor = point.descriptor
    targets = [np.diag([float(v) for v in spectrum]) for spectrum in point.spectra]
    objective = MomentumMismatch(descriptor, group.positions, targets)
    seeds = [
        np.random.SeedSequence([options.seed, candidate_index, start]) for start in range(options.starts)
    ]
    found = []
    for vec in _minimize(objective, seeds, options):
        cp = CriticalPoint.create(PureState(descriptor, vec), denominator, options, candidate=point)
        if cp is None:
            continue
        if cp.spectra.spectra != point.spectra:
            logger.warning(
                "Solver output does not sit at its candidate",
                extra={"extra_data": {"candidate": point.as_strings(), "found": cp.spectra.as_strings()}},
            )
            continue
        found.append(cp)
    return _dedupe(found)


def solve_in_eigenspace(
    a: AlphaOperator,
    group: EigenGroup,
    options: Optional[SearchOptions] = None,
    denominator: Optional[int] = None,
    candidate_index: int = 1,
) -> List[PureState]:
    """Unit states on ``group`` whose momentum equals alpha_P, one per fingerprint."""
    options = options or SearchOptions.create()
    denominator = denominator or _point_denominator(a.point)
    return [cp.state for cp in _solve_group(a.point, group, candidate_index, denominator, options)]


def _point_denominator(point: SpectrumPoint) -> int:
    denominator = 1
    for value in point.flattened():
        denominator = np.lcm(denominator, value.denominator)
    return int(max(denominator, 2))


def _zero_branch(
    descriptor: SystemDescriptor, denominator: int, options: SearchOptions, predicate: MembershipPredicate
) -> List[CriticalPoint]:
    zero = SpectrumPoint(
        descriptor=descriptor,
        spectra=tuple((Fraction(0),) * descriptor.local_dim for _ in range(descriptor.num_components)),
    )
    if not predicate(zero):
        logger.warning(
            "Zero-momentum branch is empty: the zero point fails the membership catalog",
            extra={"extra_data": {"system": descriptor.label}},
        )
        return []
    zeros = [np.zeros((descriptor.local_dim, descriptor.local_dim))] * descriptor.num_components
    objective = MomentumMismatch(descriptor, range(dimension(descriptor)), zeros)
    seeds = [np.random.SeedSequence([options.seed, 0, start]) for start in range(options.starts)]
    found = []
    for vec in _minimize(objective, seeds, options):
        cp = CriticalPoint.create(PureState(descriptor, vec), denominator, options, branch="zero_momentum")
        if cp is not None:
            found.append(cp)
    if not found:
        logger.warning("Zero-momentum branch is empty", extra={"extra_data": {"system": descriptor.label}})
    return _dedupe(found)


def _sweep_tasks(candidates: Sequence[SpectrumPoint]) -> List[Tuple[int, SpectrumPoint, EigenGroup]]:
    tasks = []
    for candidate_index, point in enumerate(candidates, start=1):
        expected = point.weighted_norm_sq()
        for group in eigenspaces(build_alpha(point, point.descriptor)):
            if group.value != expected:
                continue
            if _diagonal_feasible(point.descriptor, point, group):
                tasks.append((candidate_index, point, group))
    return tasks


def classify_system(
    descriptor: SystemDescriptor,
    denominator: int,
    options: Optional[SearchOptions] = None,
    predicate: Optional[MembershipPredicate] = None,
) -> List[CriticalPoint]:
    """Zero-momentum representatives plus the grid sweep, one entry per fingerprint, by descending Var."""
    options = options or SearchOptions.create()
    predicate = predicate or membership_predicate(descriptor)
    zero_points = _zero_branch(descriptor, denominator, options, predicate)

    candidates = enumerate_candidates(descriptor, denominator, predicate)
    tasks = _sweep_tasks(candidates)
    logger.info(
        "Sweeping eigenspaces",
        extra={"extra_data": {"system": descriptor.label, "candidates": len(candidates), "tasks": len(tasks)}},
    )

    def run(task: Tuple[int, SpectrumPoint, EigenGroup]) -> List[CriticalPoint]:
        candidate_index, point, group = task
        return _solve_group(point, group, candidate_index, denominator, options)

    if options.workers > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as pool:
            batches = list(pool.map(run, tasks))
    else:
        batches = [run(task) for task in tasks]

    merged = _dedupe(zero_points + [cp for batch in batches for cp in batch])
    return sorted(merged, key=lambda cp: -round(cp.variance, FINGERPRINT_DECIMALS))


def three_qubit_canonical(p: complex, q: complex, r: complex, s: complex, z: complex) -> PureState:
    """p|011> + q|101> + r|110> + s|111> + z|000>."""
    descriptor = SystemDescriptor(kind=ParticleKind.distinguishable, local_dim=2, num_particles=3)
    return PureState.from_labels(
        descriptor,
        {(1, 2, 2): p, (2, 1, 2): q, (2, 2, 1): r, (2, 2, 2): s, (1, 1, 1): z},
    )


CANONICAL_SUPPORT = ((1, 2, 2), (2, 1, 2), (2, 2, 1), (2, 2, 2), (1, 1, 1))


def canonical_zero_momentum(seed: int, starts: int, options: Optional[SearchOptions] = None) -> List[PureState]:
    """Minimize ||mu||^2 over the five canonical three-qubit parameters."""
    options = options or SearchOptions.create(seed=seed, starts=starts)
    descriptor = SystemDescriptor(kind=ParticleKind.distinguishable, local_dim=2, num_particles=3)
    space = get_space(descriptor)
    support = [space.position(labels) for labels in CANONICAL_SUPPORT]
    objective = MomentumMismatch(descriptor, support, [np.zeros((2, 2))] * 3)
    seeds = [np.random.SeedSequence([seed, 0, start]) for start in range(starts)]
    return [PureState(descriptor, vec) for vec in _minimize(objective, seeds, options)]
