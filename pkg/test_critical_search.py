import dataclasses
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import unitary_group

from src.catalog import CATALOG, THREE_QUBITS, WEDGE_3_5, entry, label_for
from src.critical_search import (
    CriticalPoint,
    SearchOptions,
    build_alpha,
    canonical_zero_momentum,
    classify_system,
    eigenspaces,
    is_critical,
    is_zero_momentum,
    solve_in_eigenspace,
    standardize,
    three_qubit_canonical,
)
from src.errors import ShapeMismatchError
from src.hilbert import get_space
from src.log_buffer import log_buffer
from src.momentum import MomentumValue, momentum, total_variance
from src.polytope import parse_rational_spectrum
from src.states import apply_local, random_state

F = Fraction


def test_catalog_states_are_critical():
    for item in CATALOG:
        verdict = is_critical(item.state())
        assert verdict.critical, item.name
        assert verdict.lam == pytest.approx(float(item.lam), abs=1e-10)


def test_random_state_is_not_critical():
    verdict = is_critical(random_state(THREE_QUBITS, 0))
    assert not verdict.critical
    assert verdict.residual > 1e-3


def test_zero_momentum_detection():
    assert is_zero_momentum(entry("GHZ").state())
    assert not is_zero_momentum(entry("W").state())
    assert not is_zero_momentum(entry("psi2").state())


@pytest.mark.parametrize("item", CATALOG, ids=lambda item: item.name)
def test_critical_point_records(item, critical_point):
    cp = critical_point(item.name)
    assert cp.variance == pytest.approx(float(item.var), abs=1e-8)
    assert cp.lam == pytest.approx(float(item.lam), abs=1e-10)
    assert cp.morse_index == item.morse_index
    assert cp.marginal_directions == 0
    spectra = [list(s) for s in cp.float_spectra]
    assert label_for(item.descriptor, spectra, cp.variance, cp.morse_index) == item.name


def test_non_critical_input_is_discarded(options):
    assert CriticalPoint.create(random_state(WEDGE_3_5, 1), 30, options) is None
    assert any("Discarded non-critical" in line for line in log_buffer.as_strings())


def test_alpha_eigenspaces_for_w_point():
    point = parse_rational_spectrum("1/6,-1/6,1/6,-1/6,1/6,-1/6", THREE_QUBITS)
    alpha = build_alpha(point, THREE_QUBITS)
    groups = eigenspaces(alpha)
    assert [group.value for group in groups] == [F(1, 2), F(1, 6), F(-1, 6), F(-1, 2)]
    basis = get_space(THREE_QUBITS).basis
    w_group = groups[1]
    assert {basis[pos] for pos in w_group.positions} == {(2, 1, 1), (1, 2, 1), (1, 1, 2)}
    assert w_group.value == point.weighted_norm_sq()


def test_alpha_rejects_other_system():
    point = parse_rational_spectrum("1/6,-1/6,1/6,-1/6,1/6,-1/6", THREE_QUBITS)
    with pytest.raises(ShapeMismatchError):
        build_alpha(point, WEDGE_3_5)


def test_solve_in_w_eigenspace(options):
    point = parse_rational_spectrum("1/6,-1/6,1/6,-1/6,1/6,-1/6", THREE_QUBITS)
    alpha = build_alpha(point, THREE_QUBITS)
    group = eigenspaces(alpha)[1]
    states = solve_in_eigenspace(alpha, group, options)
    assert len(states) == 1
    psi = states[0]
    assert is_critical(psi).critical
    assert total_variance(psi) == pytest.approx(13 / 3, abs=1e-8)
    for spectrum in momentum(psi).spectra():
        assert np.allclose(spectrum, [1 / 6, -1 / 6], atol=1e-8)


def test_standardize_diagonalizes_reductions():
    psi = random_state(THREE_QUBITS, 12)
    rotated, units = standardize(psi)
    assert len(units) == 3
    assert total_variance(rotated) == pytest.approx(total_variance(psi), abs=1e-10)
    for site in range(3):
        rho = rotated.space.reduced_density(rotated.amplitudes, site)
        assert abs(rho[0, 1]) < 1e-10
        assert rho[0, 0].real >= rho[1, 1].real


def test_morse_index_is_invariant_under_local_unitaries(options):
    rng = np.random.default_rng(5)
    w = entry("W").state()
    moved = apply_local(w, [unitary_group.rvs(2, random_state=rng) for _ in range(3)])
    cp = CriticalPoint.create(moved, 6, options)
    assert cp is not None
    assert cp.morse_index == 2
    assert cp.fingerprint() == CriticalPoint.create(w, 6, options).fingerprint()


def test_three_qubit_classification(options):
    points = classify_system(THREE_QUBITS, 6, options)
    summary = [(round(cp.variance, 8), cp.morse_index) for cp in points]
    assert summary == [(4.5, 0), (round(13 / 3, 8), 2), (4.0, 6), (4.0, 6), (4.0, 6), (3.0, 8)]
    assert points[0].branch == "zero_momentum"
    assert points[0].lambda_rational() == 0
    assert points[1].lambda_rational() == F(1, 6)
    assert points[-1].lambda_rational() == F(3, 2)
    labels = {
        label_for(THREE_QUBITS, [list(s) for s in cp.float_spectra], cp.variance, cp.morse_index)
        for cp in points
    }
    assert labels == {"GHZ", "W", "BS1", "BS2", "BS3", "SEP"}


def test_wedge_classification(options):
    points = classify_system(WEDGE_3_5, 30, options)
    assert [cp.morse_index for cp in points] == [0, 6]
    assert [cp.variance for cp in points] == [pytest.approx(7.0, abs=1e-8), pytest.approx(6.0, abs=1e-8)]
    assert [cp.lambda_rational() for cp in points] == [F(1, 15), F(2, 5)]
    assert [cp.casimir_minus_hs_norm_sq for cp in points] == [
        pytest.approx(323 / 45, abs=1e-8),
        pytest.approx(106 / 15, abs=1e-8),
    ]
    assert all(cp.branch == "sweep" for cp in points)
    assert any("Zero-momentum branch is empty" in line for line in log_buffer.as_strings())


def test_wedge_classification_does_not_depend_on_workers(options):
    serial = classify_system(WEDGE_3_5, 30, options)
    parallel = classify_system(WEDGE_3_5, 30, dataclasses.replace(options, workers=4))
    assert [cp.fingerprint() for cp in serial] == [cp.fingerprint() for cp in parallel]
    assert [np.allclose(a.state.amplitudes, b.state.amplitudes) for a, b in zip(serial, parallel)] == [True, True]


def test_canonical_form_zero_momentum_is_ghz_like():
    ghz = three_qubit_canonical(0, 0, 0, 1, 1)
    assert total_variance(ghz) == pytest.approx(4.5, abs=1e-10)
    w = three_qubit_canonical(1, 1, 1, 0, 0)
    assert total_variance(w) == pytest.approx(13 / 3, abs=1e-10)
    minimizers = canonical_zero_momentum(seed=3, starts=6)
    assert minimizers
    for psi in minimizers:
        assert total_variance(psi) == pytest.approx(4.5, abs=1e-8)


def test_three_qubit_classification_at_default_settings():
    points = classify_system(THREE_QUBITS, 6, SearchOptions.create())
    summary = [(round(cp.variance, 8), cp.morse_index) for cp in points]
    assert summary == [(4.5, 0), (round(13 / 3, 8), 2), (4.0, 6), (4.0, 6), (4.0, 6), (3.0, 8)]


@pytest.mark.parametrize("descriptor, denominator", [(THREE_QUBITS, 6), (WEDGE_3_5, 30)], ids=["qubits", "wedge"])
def test_found_states_carry_their_candidate_momentum(descriptor, denominator, options):
    for cp in classify_system(descriptor, denominator, options):
        if cp.branch == "zero_momentum":
            target = MomentumValue.zero(descriptor)
        else:
            target = MomentumValue(
                descriptor, tuple(np.diag([float(v) for v in s]) for s in cp.candidate.spectra)
            )
        assert momentum(cp.state).max_residual(target) < 1e-8
