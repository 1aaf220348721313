"""Projected gradient descent on the unit sphere of C^d with a least-squares polish."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy.optimize import least_squares

from .logging_utils import get_logger

logger = get_logger(__name__)


class SphereObjective(Protocol):
    """f(x) = ||r(x)||^2 on unit vectors, with Re<gradient, dx> = df."""

    def value(self, vec: np.ndarray) -> float: ...

    def gradient(self, vec: np.ndarray) -> np.ndarray: ...

    def residuals(self, vec: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class DescentOptions:
    starts: int = 32
    max_iter: int = 2000
    step: float = 1.0
    tol: float = 1e-8
    # switch to the least-squares polish below this objective value
    polish_threshold: float = 1e-2
    bb_min: float = 1e-4
    bb_max: float = 1e4
    armijo: float = 1e-4
    grad_tol: float = 1e-12
    min_step: float = 1e-14
    stall_tol: float = 1e-13


@dataclass
class DescentResult:
    vector: np.ndarray
    value: float
    iterations: int

    def converged(self, tol: float) -> bool:
        return self.value < tol * tol


def random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


def _retract(vec: np.ndarray) -> np.ndarray:
    return vec / np.linalg.norm(vec)


def tangent_gradient(vec: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Project a Euclidean gradient onto the real tangent space of the sphere at ``vec``."""
    return grad - np.real(np.vdot(vec, grad)) * vec


def polish(objective: SphereObjective, vec: np.ndarray) -> np.ndarray:
    dim = vec.shape[0]

    def unpack(params: np.ndarray) -> np.ndarray:
        return _retract(params[:dim] + 1j * params[dim:])

    result = least_squares(
        lambda params: objective.residuals(unpack(params)),
        np.concatenate([vec.real, vec.imag]),
        method="trf",
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=200,
    )
    return unpack(result.x)


def bb_step(s: np.ndarray, y: np.ndarray, options: DescentOptions) -> float:
    """Barzilai-Borwein length <s, y> / <y, y>, clipped; falls back to ``options.step``."""
    sy = float(np.real(np.vdot(s, y)))
    yy = float(np.real(np.vdot(y, y)))
    if sy <= 0.0 or yy <= 0.0:
        return options.step
    return float(np.clip(sy / yy, options.bb_min, options.bb_max))


def minimize_on_sphere(
    objective: SphereObjective, start: np.ndarray, options: DescentOptions
) -> DescentResult:
    """Projected gradient descent with Barzilai-Borwein steps from one start, then a polish.

    The BB step is only a trial length; Armijo backtracking keeps each accepted step a descent step.
    """
    vec = _retract(np.asarray(start, dtype=np.complex128))
    value = objective.value(vec)
    direction = tangent_gradient(vec, objective.gradient(vec))
    step = options.step
    iteration = 0
    for iteration in range(1, options.max_iter + 1):
        if value < options.polish_threshold:
            break
        slope = float(np.real(np.vdot(direction, direction)))
        if np.sqrt(slope) < options.grad_tol:
            break
        while step >= options.min_step:
            trial = _retract(vec - step * direction)
            trial_value = objective.value(trial)
            if trial_value <= value - options.armijo * step * slope:
                break
            step /= 2
        else:
            break
        stalled = value - trial_value < options.stall_tol * max(value, 1.0)
        trial_direction = tangent_gradient(trial, objective.gradient(trial))
        step = bb_step(trial - vec, trial_direction - direction, options)
        vec, value, direction = trial, trial_value, trial_direction
        if stalled:
            break

    # polish the last iterate however the descent ended; slow tails stop short of the threshold
    polished = polish(objective, vec)
    polished_value = objective.value(polished)
    if polished_value < value:
        vec, value = polished, polished_value

    return DescentResult(vector=vec, value=value, iterations=iteration)
