"""Named critical states of the two shipped systems and their expected invariants."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .models import ParticleKind, SystemDescriptor
from .momentum import momentum
from .states import PureState

THREE_QUBITS = SystemDescriptor(kind=ParticleKind.distinguishable, local_dim=2, num_particles=3)
WEDGE_3_5 = SystemDescriptor(kind=ParticleKind.fermionic, local_dim=5, num_particles=3)

MATCH_TOL = 1e-6


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    descriptor: SystemDescriptor
    # label tuple -> amplitude before normalization
    terms: Tuple[Tuple[Tuple[int, ...], complex], ...]
    var: Fraction
    lam: Fraction
    morse_index: int

    def state(self) -> PureState:
        return PureState.from_labels(self.descriptor, dict(self.terms)).normalized()

    def spectra(self) -> List[np.ndarray]:
        return momentum(self.state()).spectra()


def _equal(*labels: Tuple[int, ...]) -> Tuple[Tuple[Tuple[int, ...], complex], ...]:
    return tuple((label, 1.0) for label in labels)


CATALOG: Tuple[CatalogEntry, ...] = (
    CatalogEntry("GHZ", THREE_QUBITS, _equal((1, 1, 1), (2, 2, 2)), Fraction(9, 2), Fraction(0), 0),
    CatalogEntry("W", THREE_QUBITS, _equal((2, 1, 1), (1, 2, 1), (1, 1, 2)), Fraction(13, 3), Fraction(1, 6), 2),
    CatalogEntry("BS1", THREE_QUBITS, _equal((1, 1, 1), (1, 2, 2)), Fraction(4), Fraction(1, 2), 6),
    CatalogEntry("BS2", THREE_QUBITS, _equal((1, 1, 1), (2, 1, 2)), Fraction(4), Fraction(1, 2), 6),
    CatalogEntry("BS3", THREE_QUBITS, _equal((1, 1, 1), (2, 2, 1)), Fraction(4), Fraction(1, 2), 6),
    CatalogEntry("SEP", THREE_QUBITS, _equal((1, 1, 1)), Fraction(3), Fraction(3, 2), 8),
    CatalogEntry("psi1", WEDGE_3_5, _equal((1, 2, 3)), Fraction(6), Fraction(2, 5), 6),
    CatalogEntry("psi2", WEDGE_3_5, _equal((1, 2, 3), (1, 4, 5)), Fraction(7), Fraction(1, 15), 0),
)

_BY_NAME: Dict[str, CatalogEntry] = {entry.name: entry for entry in CATALOG}


def entry(name: str) -> CatalogEntry:
    return _BY_NAME[name]


def catalog_for(descriptor: SystemDescriptor) -> List[CatalogEntry]:
    return [e for e in CATALOG if e.descriptor == descriptor]


def label_for(
    descriptor: SystemDescriptor,
    spectra: List[List[float]],
    var: float,
    morse_index: Optional[int],
) -> Optional[str]:
    """Catalog name whose site-ordered spectra, Var and index match, if any."""
    for candidate in catalog_for(descriptor):
        if morse_index is not None and morse_index != candidate.morse_index:
            continue
        if not math.isclose(var, float(candidate.var), abs_tol=MATCH_TOL):
            continue
        expected = candidate.spectra()
        if all(
            np.allclose(np.asarray(found), np.asarray(wanted), atol=MATCH_TOL)
            for found, wanted in zip(spectra, expected)
        ):
            return candidate.name
    return None
