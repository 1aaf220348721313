from abc import ABC, abstractmethod
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..errors import InvalidInputError, ShapeMismatchError
from ..models import SystemDescriptor

Labels = Tuple[int, ...]


class HilbertSpace(ABC):
    """Kind-specific bookkeeping of the system Hilbert space.

    Basis labels are 1-based tuples; amplitude vectors are indexed by the
    position of a label in :attr:`basis` (lexicographic order).
    """

    def __init__(self, descriptor: SystemDescriptor) -> None:
        self.descriptor = descriptor
        self.local_dim = descriptor.local_dim
        self.num_particles = descriptor.num_particles
        self.basis: List[Labels] = self._enumerate()
        self._positions: Dict[Labels, int] = {labels: pos for pos, labels in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def num_components(self) -> int:
        return self.descriptor.num_components

    def position(self, labels: Sequence[int]) -> int:
        key = tuple(int(label) for label in labels)
        self.validate_labels(key)
        return self._positions[key]

    def validate_labels(self, labels: Labels) -> None:
        if len(labels) != self.num_particles:
            raise InvalidInputError(
                f"index {list(labels)} has {len(labels)} labels, expected {self.num_particles}"
            )
        if any(label < 1 or label > self.local_dim for label in labels):
            raise InvalidInputError(f"index {list(labels)} has labels outside 1..{self.local_dim}")
        self._check_ordering(labels)

    def check_matrix(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape != (self.local_dim, self.local_dim):
            raise ShapeMismatchError(
                f"expected a {self.local_dim}x{self.local_dim} matrix, got shape {matrix.shape}"
            )
        return matrix

    def apply_derivation(self, vec: np.ndarray, elems: Sequence[np.ndarray]) -> np.ndarray:
        """Leibniz action of one algebra element per momentum component."""
        out = np.zeros(self.dim, dtype=np.complex128)
        for component, elem in enumerate(elems):
            out += self.apply_component(vec, component, elem)
        return out

    def derivation_matrix(self, elems: Sequence[np.ndarray]) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for component, elem in enumerate(elems):
            out += self.component_matrix(component, elem)
        return out

    @abstractmethod
    def _enumerate(self) -> List[Labels]:
        """Lexicographic list of admissible label tuples."""

    @abstractmethod
    def _check_ordering(self, labels: Labels) -> None:
        """Reject label tuples violating the kind's ordering constraint."""

    @abstractmethod
    def apply_group(self, vec: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
        """Group action A_1 x ... x A_L (or A x ... x A) on an amplitude vector."""

    @abstractmethod
    def apply_component(self, vec: np.ndarray, component: int, elem: np.ndarray) -> np.ndarray:
        """Lifted action of a single N x N matrix on one momentum component."""

    @abstractmethod
    def component_matrix(self, component: int, elem: np.ndarray) -> np.ndarray:
        """Dense matrix of :meth:`apply_component`."""

    @abstractmethod
    def reduced_density(self, vec: np.ndarray, component: int) -> np.ndarray:
        """Trace-one one-particle density matrix of the ray through ``vec``."""
