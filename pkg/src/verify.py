"""
Built-in verification suites.

Each suite checks one family of properties on random or cataloged states and
reports pass/fail with its largest observed deviation.
"""
from typing import Callable, Dict, List

import numpy as np
from scipy.stats import unitary_group

from .catalog import CATALOG, entry
from .critical_search import CriticalPoint, SearchOptions, is_critical
from .errors import SloccError
from .local_algebra import casimir_constant
from .logging_utils import get_logger
from .models import ParticleKind, SuiteRecord, SystemDescriptor
from .momentum import casimir_expectation, momentum, total_variance, variance_paths
from .morse import hessian_fd_check, nonlocal_gain, orbit_maximum_excess, tangent_slocc
from .polytope import default_denominator
from .states import apply_local, basis_state, random_state

logger = get_logger(__name__)

IDENTITY_TOL = 1e-10
INVARIANCE_TOL = 1e-9
FD_TOL = 1e-3
ORBIT_TOL = 1e-9
COMPLEMENT_TOL = 1e-8

IDENTITY_SYSTEMS = [
    SystemDescriptor(kind=ParticleKind.distinguishable, local_dim=n, num_particles=l)
    for n in (2, 3, 4)
    for l in (1, 2, 3)
] + [
    SystemDescriptor(kind=ParticleKind.fermionic, local_dim=5, num_particles=3),
    SystemDescriptor(kind=ParticleKind.bosonic, local_dim=3, num_particles=3),
]


def _record(name: str, deviations: List[float], tol: float, failures: List[str], **detail) -> SuiteRecord:
    worst = max(deviations, default=0.0)
    passed = worst < tol and not failures
    if failures:
        detail["failures"] = failures[:20]
    return SuiteRecord(name=name, passed=passed, max_deviation=worst, detail=detail)


def variance_identity(seed: int, options: SearchOptions, count: int = 200) -> SuiteRecord:
    deviations = []
    for i in range(count):
        descriptor = IDENTITY_SYSTEMS[i % len(IDENTITY_SYSTEMS)]
        direct, identity = variance_paths(random_state(descriptor, [seed, i]))
        deviations.append(abs(direct - identity))
    return _record("variance_identity", deviations, IDENTITY_TOL, [], states=count)


def casimir_scalar(seed: int, options: SearchOptions, count: int = 50) -> SuiteRecord:
    deviations = []
    for descriptor in IDENTITY_SYSTEMS:
        c = casimir_constant(descriptor)
        for i in range(count):
            deviations.append(abs(casimir_expectation(random_state(descriptor, [seed, 1000 + i])) - c))
    return _record("casimir_scalar", deviations, IDENTITY_TOL, [], systems=len(IDENTITY_SYSTEMS))


def _random_units(descriptor: SystemDescriptor, rng: np.random.Generator):
    count = descriptor.num_components
    units = [unitary_group.rvs(descriptor.local_dim, random_state=rng) for _ in range(count)]
    return units[0] if descriptor.indistinguishable else units


def k_invariance(seed: int, options: SearchOptions, count: int = 50) -> SuiteRecord:
    rng = np.random.default_rng([seed, 2])
    deviations, failures = [], []
    for item in CATALOG:
        psi = item.state()
        denominator = default_denominator(item.descriptor)
        base = CriticalPoint.create(psi, denominator, options)
        if base is None:
            failures.append(f"{item.name}: not critical")
            continue
        base_spectra = momentum(psi).spectra()
        for _ in range(count):
            moved = apply_local(psi, _random_units(item.descriptor, rng))
            deviations.append(abs(total_variance(moved) - base.variance))
            deviations.extend(
                float(np.max(np.abs(a - b))) for a, b in zip(momentum(moved).spectra(), base_spectra)
            )
            if not is_critical(moved, options.criticality_tol).critical:
                failures.append(f"{item.name}: verdict changed")
                continue
            cp = CriticalPoint.create(moved, denominator, options)
            if cp is None or cp.morse_index != base.morse_index:
                failures.append(f"{item.name}: index changed")
    return _record("k_invariance", deviations, INVARIANCE_TOL, failures, samples_per_state=count)


def hessian_fd(seed: int, options: SearchOptions) -> SuiteRecord:
    deviations, failures, indices = [], [], {}
    for item in CATALOG:
        cp = CriticalPoint.create(item.state(), default_denominator(item.descriptor), options)
        if cp is None:
            failures.append(f"{item.name}: not critical")
            continue
        indices[item.name] = cp.morse_index
        deviations.append(hessian_fd_check(cp, h=1e-4, seed=seed))
        if cp.morse_index % 2:
            failures.append(f"{item.name}: odd index {cp.morse_index}")
        if cp.momentum_norm_sq < options.criticality_tol ** 2 and cp.morse_index != 0:
            failures.append(f"{item.name}: zero momentum with index {cp.morse_index}")
        if cp.morse_index != item.morse_index:
            failures.append(f"{item.name}: index {cp.morse_index}, expected {item.morse_index}")
    for name in ("W", "SEP"):
        item = entry(name)
        cp = CriticalPoint.create(item.state(), default_denominator(item.descriptor), options)
        if cp is not None:
            direction = basis_state(item.descriptor, (2, 2, 2)).amplitudes
            deviations.append(hessian_fd_check(cp, h=1e-4, explicit=[direction]))
    return _record("hessian_fd", deviations, FD_TOL, failures, indices=indices)


def orbit_maximum(seed: int, options: SearchOptions) -> SuiteRecord:
    w = entry("W")
    psi = w.state()
    excess = orbit_maximum_excess(psi, samples=100, eps=0.05, seed=seed)
    gain = nonlocal_gain(psi, basis_state(w.descriptor, (2, 2, 2)).amplitudes, eps=0.05)
    failures = [] if gain > 0 else [f"|111> perturbation changed Var by {gain:.3e}"]
    return _record(
        "orbit_maximum", [max(excess, 0.0)], ORBIT_TOL, failures, excess=excess, nonlocal_gain=gain
    )


def complement_regression(seed: int, options: SearchOptions) -> SuiteRecord:
    deviations, failures = [], []
    w = entry("W")
    space = tangent_slocc(w.state(), options.rank_tol)
    if space.complement_dim != 1:
        failures.append(f"W complement has dimension {space.complement_dim}")
    else:
        target = basis_state(w.descriptor, (2, 2, 2)).amplitudes
        deviations.append(1.0 - abs(np.vdot(target, space.complement[:, 0])))
    psi2 = tangent_slocc(entry("psi2").state(), options.rank_tol)
    if psi2.complement_dim != 0:
        failures.append(f"psi2 complement has dimension {psi2.complement_dim}")
    return _record("complement_regression", deviations, COMPLEMENT_TOL, failures)


SUITES: Dict[str, Callable[[int, SearchOptions], SuiteRecord]] = {
    "variance_identity": variance_identity,
    "casimir_scalar": casimir_scalar,
    "k_invariance": k_invariance,
    "hessian_fd": hessian_fd,
    "orbit_maximum": orbit_maximum,
    "complement_regression": complement_regression,
}


def run_suites(seed: int, options: SearchOptions) -> List[SuiteRecord]:
    records = []
    for name, suite in SUITES.items():
        try:
            record = suite(seed, options)
        except SloccError as exc:
            logger.error(
                "Verification suite raised",
                extra={"extra_data": {"suite": name, "error": str(exc), "code": exc.code}},
            )
            record = SuiteRecord(name=name, passed=False, detail={"error": str(exc)})
        if not record.passed:
            logger.warning("Verification suite failed", extra={"extra_data": {"suite": name}})
        records.append(record)
    return records
