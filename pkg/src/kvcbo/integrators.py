"""One-step integrators for the consensus SDE on the sphere and the ensemble update.

Both schemes are explicit and followed by renormalization onto the sphere;
the projection, not the scheme structure, is what enforces the constraint.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .consensus import ConsensusPoint, consensus_point, consensus_point_batch, consensus_point_subset
from .ensemble import Ensemble
from .rng import RngStream
from .sphere import DEGENERATE_NORM, gaussian_increment


class SchemeKind(enum.Enum):
    EULER_MARUYAMA_PROJECTED = "euler-maruyama"
    SEMI_IMPLICIT_PROJECTED = "semi-implicit"


@dataclass
class StepParams:
    dt: float
    lam: float = 1.0
    sigma: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError("dt must be finite and positive")
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ValueError("lambda must be finite and positive")
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError("sigma must be finite and nonnegative")
        if not self.alpha >= 0:
            raise ValueError("alpha must be nonnegative")


class DegenerateStepError(RuntimeError):
    """Pre-normalization iterate collapsed below the degeneracy threshold.

    Signals dt * sigma grossly too large; the run is aborted rather than
    silently resampled, which would corrupt statistics.
    """

    def __init__(self, particle_index: int, norm: float):
        self.particle_index = particle_index
        self.norm = norm
        super().__init__(
            f"degenerate renormalization at particle {particle_index}: |V~| = {norm:.3e}")


def _step_many(V: np.ndarray, valpha: np.ndarray, dB: np.ndarray,
               p: StepParams, scheme: SchemeKind) -> np.ndarray:
    """Shared kernel: one step for each row of V against consensus rows valpha."""
    d = V.shape[1]
    diff = V - valpha
    dist2 = np.sum(diff * diff, axis=1)
    dist = np.sqrt(dist2)
    # P(v)y = y - <v, y> v for unit v
    drift = p.dt * p.lam * (valpha - np.sum(V * valpha, axis=1)[:, None] * V)
    noise = p.sigma * dist[:, None] * (dB - np.sum(V * dB, axis=1)[:, None] * V)
    ito = p.dt * (p.sigma ** 2 / 2.0) * dist2 * (d - 1)
    if scheme is SchemeKind.EULER_MARUYAMA_PROJECTED:
        vt = V + drift + noise - ito[:, None] * V
    elif scheme is SchemeKind.SEMI_IMPLICIT_PROJECTED:
        vt = (V + drift + noise) / (1.0 + ito)[:, None]
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    norms = np.sqrt(np.sum(vt * vt, axis=1))
    bad = np.flatnonzero(norms < DEGENERATE_NORM)
    if bad.size:
        raise DegenerateStepError(int(bad[0]), float(norms[bad[0]]))
    return vt / norms[:, None]


def _step_one(v: np.ndarray, v_alpha: ConsensusPoint, p: StepParams,
              rng: RngStream, scheme: SchemeKind) -> np.ndarray:
    dB = gaussian_increment(v.shape[0], p.dt, rng)
    return _step_many(v[None, :], np.asarray(v_alpha.coords, dtype=float)[None, :],
                      dB[None, :], p, scheme)[0]


def step_euler_maruyama(v: np.ndarray, v_alpha: ConsensusPoint, p: StepParams,
                        rng: RngStream) -> np.ndarray:
    """Projected Euler-Maruyama step; consumes one Gaussian increment."""
    return _step_one(v, v_alpha, p, rng, SchemeKind.EULER_MARUYAMA_PROJECTED)


def step_semi_implicit(v: np.ndarray, v_alpha: ConsensusPoint, p: StepParams,
                       rng: RngStream) -> np.ndarray:
    """Projected semi-implicit step (Ito correction handled by a scalar division)."""
    return _step_one(v, v_alpha, p, rng, SchemeKind.SEMI_IMPLICIT_PROJECTED)


def advance_ensemble(ensemble: Ensemble, objective, p: StepParams, scheme: SchemeKind,
                     streams: list[RngStream], batch_size: int | None = None,
                     partition: bool = False,
                     batch_rng: RngStream | None = None) -> tuple[Ensemble, ConsensusPoint]:
    """One full time step: consensus, particle updates, energy cache refresh.

    Returns the new ensemble and the consensus point used for reporting (the
    full-population point in partition mode, otherwise the one the particles saw).
    Increments are drawn per particle from that particle's own stream, in
    particle-index order, so serial and parallel execution agree.
    """
    n, d = ensemble.particles.shape
    dB = np.empty((n, d))
    for i in range(n):
        dB[i] = gaussian_increment(d, p.dt, streams[i])

    if partition and batch_size is not None and batch_size < n:
        if batch_rng is None:
            raise ValueError("partition mode needs a batch rng")
        # Disjoint batches, resampled every step; remainder joins the last batch.
        perm = batch_rng.permutation(n)
        n_batches = n // batch_size
        valpha_rows = np.empty((n, d))
        for k in range(n_batches):
            hi = (k + 1) * batch_size if k < n_batches - 1 else n
            idx = perm[k * batch_size:hi]
            cp_k = consensus_point_subset(ensemble, p.alpha, idx)
            valpha_rows[idx] = cp_k.coords
        cp = consensus_point(ensemble, p.alpha)
    else:
        if batch_size is not None:
            if batch_rng is None:
                raise ValueError("mini-batch mode needs a batch rng")
            cp = consensus_point_batch(ensemble, p.alpha, batch_size, batch_rng)
        else:
            cp = consensus_point(ensemble, p.alpha)
        valpha_rows = np.broadcast_to(cp.coords, (n, d))

    new_particles = _step_many(ensemble.particles, valpha_rows, dB, p, scheme)
    return Ensemble(new_particles, objective.evaluate_many(new_particles)), cp
