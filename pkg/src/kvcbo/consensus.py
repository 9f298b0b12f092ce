"""Weighted consensus point, numerically stable for very large weight exponents.

The naive softmax normalizer sum_j exp(-alpha E_j) underflows already for
moderate alpha. Shifting every energy by the current minimum guarantees the
best particle contributes weight exactly 1, so the normalizer is >= 1 and the
computation stays finite for alpha up to 1e300.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import Ensemble
from .rng import RngStream


@dataclass
class ConsensusPoint:
    coords: np.ndarray        # generally not unit norm (convex hull point)
    weight_mass: float        # sum of shifted weights, always >= 1
    argmin_index: int         # ensemble index of the best participating particle
    batch_indices: np.ndarray | None = None  # subset used, None for full population


def _shifted_softmax_mean(particles: np.ndarray, energies: np.ndarray,
                          alpha: float) -> tuple[np.ndarray, float, int]:
    best = int(np.argmin(energies))  # ties broken by lowest index
    w = np.exp(-alpha * (energies - energies[best]))
    mass = float(np.sum(w))
    coords = (w @ particles) / mass
    return coords, mass, best


def consensus_point(ensemble: Ensemble, alpha: float) -> ConsensusPoint:
    """Softmax-weighted barycenter of the whole ensemble."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    coords, mass, best = _shifted_softmax_mean(ensemble.particles, ensemble.energies, alpha)
    return ConsensusPoint(coords, mass, best)


def consensus_point_batch(ensemble: Ensemble, alpha: float, batch_size: int,
                          rng: RngStream) -> ConsensusPoint:
    """Softmax mean over a fresh random subset of batch_size particles.

    Falls back to the full population when batch_size >= N.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    n = ensemble.count
    if batch_size >= n:
        return consensus_point(ensemble, alpha)
    idx = np.sort(rng.subset(n, batch_size))
    coords, mass, best_local = _shifted_softmax_mean(
        ensemble.particles[idx], ensemble.energies[idx], alpha)
    return ConsensusPoint(coords, mass, int(idx[best_local]), batch_indices=idx)


def consensus_point_subset(ensemble: Ensemble, alpha: float,
                           indices: np.ndarray) -> ConsensusPoint:
    """Softmax mean over an explicit index subset (disjoint-batch variant)."""
    coords, mass, best_local = _shifted_softmax_mean(
        ensemble.particles[indices], ensemble.energies[indices], alpha)
    return ConsensusPoint(coords, mass, int(indices[best_local]), batch_indices=indices)
