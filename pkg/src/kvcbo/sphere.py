"""Geometry and sampling primitives on the unit hypersphere."""

from __future__ import annotations

import numpy as np

from .rng import RngStream

# ~100x double epsilon, accumulated over d <= 1e4 coordinates.
UNIT_TOL = 1e-12
# Vectors shorter than this are degenerate and cannot be renormalized.
DEGENERATE_NORM = 1e-12


class DegenerateVectorError(RuntimeError):
    """Renormalization target has norm below the degeneracy threshold."""


def normalize(v: np.ndarray) -> np.ndarray:
    """Return v / |v|, raising if |v| is degenerate."""
    nrm = float(np.sqrt(np.sum(v * v)))
    if nrm < DEGENERATE_NORM:
        raise DegenerateVectorError(f"cannot normalize vector with norm {nrm:.3e}")
    return v / nrm


def project_tangent(v: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Orthogonal projection of y onto the tangent space at unit vector v.

    P(v) y = y - <v, y> v.
    """
    v = np.asarray(v, dtype=float)
    y = np.asarray(y, dtype=float)
    if v.shape != y.shape:
        raise ValueError(f"dimension mismatch: v has shape {v.shape}, y has shape {y.shape}")
    return y - np.dot(v, y) * v


def sample_uniform_sphere(d: int, rng: RngStream) -> np.ndarray:
    """Uniform point on S^{d-1} via normalized Gaussians."""
    if d < 2:
        raise ValueError(f"sphere dimension must satisfy d >= 2, got {d}")
    while True:
        xi = rng.standard_normal(d)
        nrm = float(np.sqrt(np.sum(xi * xi)))
        if nrm >= DEGENERATE_NORM:
            return xi / nrm


def sample_uniform_halfsphere(d: int, axis_index: int, rng: RngStream) -> np.ndarray:
    """Uniform point on the half sphere with coordinate axis_index nonnegative."""
    if not 0 <= axis_index < d:
        raise ValueError(f"axis_index {axis_index} out of range for d={d}")
    v = sample_uniform_sphere(d, rng)
    if v[axis_index] < 0:
        v = -v
    return v


def gaussian_increment(d: int, dt: float, rng: RngStream) -> np.ndarray:
    """d i.i.d. N(0, dt) draws (one Brownian increment)."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return np.sqrt(dt) * rng.standard_normal(d)
