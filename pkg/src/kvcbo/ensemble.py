"""Particle ensemble: positions on the sphere plus cached objective values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import RngStream
from .sphere import sample_uniform_halfsphere, sample_uniform_sphere


@dataclass
class Ensemble:
    """N particles on S^{d-1} with their objective values cached.

    energies[i] is always the objective evaluated at particles[i]; callers
    that move particles must refresh the cache before exposing the ensemble.
    """

    particles: np.ndarray  # (N, d)
    energies: np.ndarray   # (N,)

    def __post_init__(self):
        self.particles = np.asarray(self.particles, dtype=float)
        self.energies = np.asarray(self.energies, dtype=float)
        if self.particles.ndim != 2 or self.particles.shape[0] < 1:
            raise ValueError("ensemble needs at least one particle")
        if self.energies.shape != (self.particles.shape[0],):
            raise ValueError("energies length must match particle count")

    @property
    def count(self) -> int:
        return self.particles.shape[0]

    @property
    def dimension(self) -> int:
        return self.particles.shape[1]

    @classmethod
    def init_uniform(cls, objective, n: int, rng: RngStream,
                     half_axis: int | None = None) -> "Ensemble":
        """n particles uniform on the sphere (or half sphere when half_axis set)."""
        d = objective.dimension
        if half_axis is None:
            pts = np.stack([sample_uniform_sphere(d, rng) for _ in range(n)])
        else:
            pts = np.stack([sample_uniform_halfsphere(d, half_axis, rng) for _ in range(n)])
        return cls(pts, objective.evaluate_many(pts))
