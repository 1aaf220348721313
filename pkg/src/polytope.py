"""Points of the momentum polytope, membership catalogs and grid enumeration.

All polytope logic runs on ``fractions.Fraction``; floats only enter through
:func:`spectrum_point`, which rounds measured spectra onto a grid.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidInputError, ShapeMismatchError
from .logging_utils import get_logger
from .models import ParticleKind, SystemDescriptor
from .momentum import momentum
from .states import PureState

logger = get_logger(__name__)

OFF_LATTICE_TOL = 1e-6

Spectra = Tuple[Tuple[Fraction, ...], ...]
MembershipPredicate = Callable[["SpectrumPoint"], bool]


@dataclass(frozen=True)
class SpectrumPoint:
    """Non-increasing spectra P_k of rho_k - I/N, one per momentum component."""

    descriptor: SystemDescriptor
    spectra: Spectra
    max_rounding_error: float = 0.0
    float_spectra: Optional[Tuple[Tuple[float, ...], ...]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        n = self.descriptor.local_dim
        if len(self.spectra) != self.descriptor.num_components:
            raise ShapeMismatchError(
                f"{self.descriptor.label} needs {self.descriptor.num_components} spectra, got {len(self.spectra)}"
            )
        low, high = Fraction(-1, n), Fraction(n - 1, n)
        for spectrum in self.spectra:
            if len(spectrum) != n:
                raise ShapeMismatchError(f"each spectrum needs {n} entries, got {len(spectrum)}")
            if any(a < b for a, b in zip(spectrum, spectrum[1:])):
                raise InvalidInputError(f"spectrum {_fmt(spectrum)} is not non-increasing")
            if sum(spectrum) != 0:
                raise InvalidInputError(f"spectrum {_fmt(spectrum)} does not sum to 0")
            if spectrum[0] > high or spectrum[-1] < low:
                raise InvalidInputError(f"spectrum {_fmt(spectrum)} leaves [{low}, {high}]")

    @property
    def is_zero(self) -> bool:
        return all(value == 0 for spectrum in self.spectra for value in spectrum)

    def flattened(self) -> Tuple[Fraction, ...]:
        return tuple(value for spectrum in self.spectra for value in spectrum)

    def eigenvalues(self, component: int = 0) -> Tuple[Fraction, ...]:
        """Spectrum of rho_k itself (P_k + 1/N)."""
        shift = Fraction(1, self.descriptor.local_dim)
        return tuple(value + shift for value in self.spectra[component])

    def weighted_norm_sq(self) -> Fraction:
        """The eigenvalue lambda any state with mu = alpha_P must carry."""
        weight = self.descriptor.num_particles if self.descriptor.indistinguishable else 1
        return weight * sum(value * value for value in self.flattened())

    def as_strings(self) -> List[List[str]]:
        return [[str(value) for value in spectrum] for spectrum in self.spectra]


def _fmt(spectrum: Sequence[Fraction]) -> str:
    return "(" + ", ".join(str(value) for value in spectrum) + ")"


def _grid_bounds(n: int, denominator: int) -> Tuple[int, int]:
    return -((denominator) // n), (denominator * (n - 1)) // n


def _round_spectrum(values: np.ndarray, n: int, denominator: int) -> Tuple[Fraction, ...]:
    low, high = _grid_bounds(n, denominator)
    steps = [min(max(int(round(value * denominator)), low), high) for value in values]
    # push the rounding residue onto the entries that were rounded the furthest
    residue = sum(steps)
    while residue != 0:
        direction = -1 if residue > 0 else 1
        candidates = [
            pos for pos, step in enumerate(steps) if low <= step + direction <= high
        ]
        pos = max(candidates, key=lambda p: direction * (values[p] * denominator - steps[p]))
        steps[pos] += direction
        residue += direction
    return tuple(sorted((Fraction(step, denominator) for step in steps), reverse=True))


def spectrum_point(psi: PureState, rounding_denominator: int) -> SpectrumPoint:
    if rounding_denominator < 1:
        raise InvalidInputError(f"rounding denominator must be positive, got {rounding_denominator}")
    n = psi.descriptor.local_dim
    measured = [np.asarray(spectrum) for spectrum in momentum(psi).spectra()]
    rounded = tuple(_round_spectrum(spectrum, n, rounding_denominator) for spectrum in measured)
    error = max(
        float(np.max(np.abs(spectrum - np.array([float(v) for v in exact]))))
        for spectrum, exact in zip(measured, rounded)
    )
    if error > OFF_LATTICE_TOL:
        logger.warning(
            "Spectrum is not near the rational grid",
            extra={
                "extra_data": {
                    "system": psi.descriptor.label,
                    "denominator": rounding_denominator,
                    "max_rounding_error": error,
                }
            },
        )
    return SpectrumPoint(
        descriptor=psi.descriptor,
        spectra=rounded,
        max_rounding_error=error,
        float_spectra=tuple(tuple(float(v) for v in spectrum) for spectrum in measured),
    )


# Membership catalogs keyed by (kind, N, L)
_REGISTRY: Dict[Tuple[ParticleKind, int, int], MembershipPredicate] = {}


def register_membership(kind: ParticleKind, local_dim: int, num_particles: int):
    def decorator(predicate: MembershipPredicate) -> MembershipPredicate:
        _REGISTRY[(kind, local_dim, num_particles)] = predicate
        return predicate

    return decorator


def membership_predicate(descriptor: SystemDescriptor) -> MembershipPredicate:
    key = (descriptor.kind, descriptor.local_dim, descriptor.num_particles)
    if key not in _REGISTRY:
        raise InvalidInputError(
            f"no membership catalog for {descriptor.label}; supply inequalities"
        )
    return _REGISTRY[key]


def _require_shape(p: SpectrumPoint, kind: ParticleKind, n: int, l: int) -> None:
    d = p.descriptor
    if (d.kind, d.local_dim, d.num_particles) != (kind, n, l):
        raise ShapeMismatchError(f"predicate is for {kind.value},{n},{l}, got {d.label}")


@register_membership(ParticleKind.distinguishable, 2, 3)
def membership_three_qubit(p: SpectrumPoint) -> bool:
    """Polygon inequalities on the smallest local eigenvalues m_k."""
    _require_shape(p, ParticleKind.distinguishable, 2, 3)
    half = Fraction(1, 2)
    m = [half + spectrum[-1] for spectrum in p.spectra]
    if any(value < 0 or value > half for value in m):
        return False
    return all(m[k] <= m[(k + 1) % 3] + m[(k + 2) % 3] for k in range(3))


@register_membership(ParticleKind.fermionic, 5, 3)
def critical_spectrum_constraints_wedge35(p: SpectrumPoint) -> bool:
    """lambda_max = 1/3 exactly; every smaller eigenvalue at least doubly degenerate."""
    _require_shape(p, ParticleKind.fermionic, 5, 3)
    third = Fraction(1, 3)
    eigenvalues = p.eigenvalues(0)
    if any(value > third for value in eigenvalues) or eigenvalues[0] != third:
        return False
    below = [value for value in eigenvalues if value < third]
    return all(below.count(value) >= 2 for value in set(below))


@dataclass(frozen=True)
class Inequality:
    """sum_j coefficients[j] * x_j <= bound over the flattened spectra."""

    coefficients: Tuple[Fraction, ...]
    bound: Fraction

    def holds(self, point: Sequence[Fraction]) -> bool:
        return sum(a * x for a, x in zip(self.coefficients, point)) <= self.bound


def inequality_predicate(rows: Sequence[Inequality]) -> MembershipPredicate:
    def predicate(p: SpectrumPoint) -> bool:
        flat = p.flattened()
        for row in rows:
            if len(row.coefficients) != len(flat):
                raise ShapeMismatchError(
                    f"inequality has {len(row.coefficients)} coefficients, point has {len(flat)} coordinates"
                )
        return all(row.holds(flat) for row in rows)

    return predicate


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInputError(f"not a rational number: {text!r}") from exc


def parse_rational_spectrum(text: str, descriptor: SystemDescriptor) -> SpectrumPoint:
    """``p/q,...`` with N entries per momentum component, components concatenated."""
    values = [parse_rational(part) for part in text.split(",") if part.strip()]
    n = descriptor.local_dim
    expected = n * descriptor.num_components
    if len(values) != expected:
        raise InvalidInputError(f"{descriptor.label} spectra need {expected} entries, got {len(values)}")
    spectra = tuple(
        tuple(sorted(values[k * n:(k + 1) * n], reverse=True)) for k in range(descriptor.num_components)
    )
    return SpectrumPoint(descriptor=descriptor, spectra=spectra)


def default_denominator(descriptor: SystemDescriptor) -> int:
    return math.lcm(2 * descriptor.local_dim, 6)


def _component_grid(n: int, denominator: int) -> List[Tuple[Fraction, ...]]:
    """Non-increasing zero-sum spectra on the 1/denominator grid, lexicographic."""
    low, high = _grid_bounds(n, denominator)

    def extend(prefix: List[int], remaining: int, ceiling: int) -> Iterator[Tuple[int, ...]]:
        total = sum(prefix)
        if remaining == 0:
            if total == 0:
                yield tuple(prefix)
            return
        for step in range(low, ceiling + 1):
            # the remaining entries are all <= step and >= low
            if total + step + (remaining - 1) * low > 0 or total + step * remaining < 0:
                continue
            yield from extend(prefix + [step], remaining - 1, step)

    grid = [
        tuple(Fraction(step, denominator) for step in steps) for steps in extend([], n, high)
    ]
    return sorted(grid)


def enumerate_candidates(
    descriptor: SystemDescriptor,
    denominator: int,
    predicate: Optional[MembershipPredicate] = None,
) -> List[SpectrumPoint]:
    if denominator < 2:
        raise InvalidInputError(f"denominator must be at least 2, got {denominator}")
    check = predicate or membership_predicate(descriptor)
    grid = _component_grid(descriptor.local_dim, denominator)
    candidates = []
    for spectra in itertools.product(grid, repeat=descriptor.num_components):
        point = SpectrumPoint(descriptor=descriptor, spectra=tuple(spectra))
        if point.is_zero or not check(point):
            continue
        candidates.append(point)
    logger.info(
        "Enumerated polytope candidates",
        extra={"extra_data": {"system": descriptor.label, "denominator": denominator, "count": len(candidates)}},
    )
    return candidates
