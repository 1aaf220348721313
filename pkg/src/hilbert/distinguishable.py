import itertools
from typing import List, Sequence

import numpy as np

from .base import HilbertSpace, Labels


class DistinguishableSpace(HilbertSpace):
    """C^N x ... x C^N; the lexicographic label order is the C-order of an L-index tensor."""

    def _enumerate(self) -> List[Labels]:
        return list(itertools.product(range(1, self.local_dim + 1), repeat=self.num_particles))

    def _check_ordering(self, labels: Labels) -> None:
        return None

    def _tensor(self, vec: np.ndarray) -> np.ndarray:
        return np.asarray(vec, dtype=np.complex128).reshape((self.local_dim,) * self.num_particles)

    def _apply_at(self, tensor: np.ndarray, site: int, matrix: np.ndarray) -> np.ndarray:
        moved = np.tensordot(matrix, tensor, axes=([1], [site]))
        return np.moveaxis(moved, 0, site)

    def apply_group(self, vec: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
        tensor = self._tensor(vec)
        for site, matrix in enumerate(ops):
            tensor = self._apply_at(tensor, site, matrix)
        return tensor.reshape(-1)

    def apply_component(self, vec: np.ndarray, component: int, elem: np.ndarray) -> np.ndarray:
        return self._apply_at(self._tensor(vec), component, elem).reshape(-1)

    def component_matrix(self, component: int, elem: np.ndarray) -> np.ndarray:
        left = np.eye(self.local_dim ** component)
        right = np.eye(self.local_dim ** (self.num_particles - component - 1))
        return np.kron(np.kron(left, elem), right)

    def reduced_density(self, vec: np.ndarray, component: int) -> np.ndarray:
        # rho_ij = sum_rest psi_{i,rest} conj(psi_{j,rest}); |psi><psi| is never formed
        tensor = np.moveaxis(self._tensor(vec), component, 0).reshape(self.local_dim, -1)
        norm_sq = float(np.vdot(vec, vec).real)
        return (tensor @ tensor.conj().T) / norm_sq
