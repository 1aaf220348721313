from __future__ import annotations

import itertools
import math
from abc import abstractmethod
from collections import Counter
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..errors import InvalidInputError
from .base import HilbertSpace, Labels

# (src positions, dst positions, coefficients) of a^dagger_i a_j
Transition = Tuple[np.ndarray, np.ndarray, np.ndarray]


def permanent(matrix: np.ndarray) -> complex:
    size = matrix.shape[0]
    total = 0j
    for perm in itertools.permutations(range(size)):
        term = 1 + 0j
        for row, col in enumerate(perm):
            term *= matrix[row, col]
        total += term
    return total


class FockSpace(HilbertSpace):
    """Fixed-particle-number sector of a bosonic or fermionic Fock space.

    Identical particles carry a single momentum component; every lifted
    one-body operator is the second-quantized sum of a^dagger_i a_j terms,
    tabulated once per space.
    """

    def __init__(self, descriptor) -> None:
        super().__init__(descriptor)
        self._transitions: Dict[Tuple[int, int], Transition] = self._build_transitions()

    @abstractmethod
    def _hop(self, labels: Labels, i: int, j: int) -> Tuple[Labels, float] | None:
        """Image of a^dagger_i a_j on the basis vector ``labels`` (0-based orbitals)."""

    def _build_transitions(self) -> Dict[Tuple[int, int], Transition]:
        table: Dict[Tuple[int, int], Tuple[List[int], List[int], List[float]]] = {}
        for src, labels in enumerate(self.basis):
            zero_based = tuple(label - 1 for label in labels)
            for j in sorted(set(zero_based)):
                for i in range(self.local_dim):
                    hop = self._hop(zero_based, i, j)
                    if hop is None:
                        continue
                    target, coef = hop
                    dst = self._positions[tuple(label + 1 for label in target)]
                    srcs, dsts, coefs = table.setdefault((i, j), ([], [], []))
                    srcs.append(src)
                    dsts.append(dst)
                    coefs.append(coef)
        return {
            key: (np.array(srcs), np.array(dsts), np.array(coefs, dtype=np.float64))
            for key, (srcs, dsts, coefs) in table.items()
        }

    def _single(self, component: int) -> None:
        if component != 0:
            raise InvalidInputError("identical particles have a single momentum component (site 1)")

    def apply_group(self, vec: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
        return self.group_matrix(ops[0]) @ np.asarray(vec, dtype=np.complex128)

    def apply_component(self, vec: np.ndarray, component: int, elem: np.ndarray) -> np.ndarray:
        self._single(component)
        vec = np.asarray(vec, dtype=np.complex128)
        out = np.zeros(self.dim, dtype=np.complex128)
        for (i, j), (srcs, dsts, coefs) in self._transitions.items():
            if elem[i, j] != 0:
                np.add.at(out, dsts, elem[i, j] * coefs * vec[srcs])
        return out

    def component_matrix(self, component: int, elem: np.ndarray) -> np.ndarray:
        self._single(component)
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for (i, j), (srcs, dsts, coefs) in self._transitions.items():
            if elem[i, j] != 0:
                np.add.at(out, (dsts, srcs), elem[i, j] * coefs)
        return out

    def reduced_density(self, vec: np.ndarray, component: int) -> np.ndarray:
        self._single(component)
        vec = np.asarray(vec, dtype=np.complex128)
        gamma = np.zeros((self.local_dim, self.local_dim), dtype=np.complex128)
        # gamma_ij = <psi| a^dagger_j a_i |psi>
        for (i, j), (srcs, dsts, coefs) in self._transitions.items():
            gamma[j, i] = np.sum(vec[dsts].conj() * coefs * vec[srcs])
        norm_sq = float(np.vdot(vec, vec).real)
        return gamma / (self.num_particles * norm_sq)

    def group_matrix(self, matrix: np.ndarray) -> np.ndarray:
        """Restriction of A x ... x A to the (anti)symmetric sector."""
        columns = [np.array(labels) - 1 for labels in self.basis]
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for col, source in enumerate(columns):
            for row, target in enumerate(columns):
                out[row, col] = self._minor(matrix[np.ix_(target, source)], target, source)
        return out

    @abstractmethod
    def _minor(self, block: np.ndarray, target: np.ndarray, source: np.ndarray) -> complex:
        """Matrix element of the lifted group action between two basis vectors."""


class FermionicSpace(FockSpace):
    """Antisymmetric sector wedge^L C^N with Slater-determinant basis |i_1 < ... < i_L>."""

    def _enumerate(self) -> List[Labels]:
        return list(itertools.combinations(range(1, self.local_dim + 1), self.num_particles))

    def _check_ordering(self, labels: Labels) -> None:
        if any(a >= b for a, b in zip(labels, labels[1:])):
            raise InvalidInputError(f"index {list(labels)} not strictly increasing")

    def _hop(self, labels: Labels, i: int, j: int):
        removed_at = labels.index(j)
        rest = labels[:removed_at] + labels[removed_at + 1:]
        if i == j:
            return labels, 1.0
        if i in rest:
            return None
        inserted_at = sum(1 for orbital in rest if orbital < i)
        target = rest[:inserted_at] + (i,) + rest[inserted_at:]
        return target, float((-1) ** (removed_at + inserted_at))

    def _minor(self, block, target, source) -> complex:
        return complex(np.linalg.det(block))


class BosonicSpace(FockSpace):
    """Symmetric sector Sym^L C^N with normalized occupation basis (non-decreasing labels)."""

    def _enumerate(self) -> List[Labels]:
        return list(
            itertools.combinations_with_replacement(range(1, self.local_dim + 1), self.num_particles)
        )

    def _check_ordering(self, labels: Labels) -> None:
        if any(a > b for a, b in zip(labels, labels[1:])):
            raise InvalidInputError(f"index {list(labels)} not non-decreasing")

    def _hop(self, labels: Labels, i: int, j: int):
        occupation = Counter(labels)
        if i == j:
            return labels, float(occupation[j])
        coef = math.sqrt(occupation[j] * (occupation[i] + 1))
        rest = list(labels)
        rest.remove(j)
        return tuple(sorted(rest + [i])), coef

    def _minor(self, block, target, source) -> complex:
        weight = 1
        for count in list(Counter(target.tolist()).values()) + list(Counter(source.tolist()).values()):
            weight *= math.factorial(count)
        return permanent(block) / math.sqrt(weight)
