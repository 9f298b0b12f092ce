"""Full solver runs: configuration, the main loop, and per-run reports."""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from .consensus import consensus_point
from .ensemble import Ensemble
from .integrators import SchemeKind, StepParams, advance_ensemble
from .objectives import Objective
from .rng import STREAM_BATCH, STREAM_CULL, STREAM_INIT, RngStream, particle_streams
from .schedules import (AlphaKind, AlphaSchedule, CullingPolicy, SigmaKind,
                        SigmaSchedule, StopKind, StopRule, cull_count,
                        cull_indices, empirical_variance, should_stop,
                        update_alpha, update_sigma)


class InitKind(enum.Enum):
    FULL_SPHERE = "full-sphere"
    HALF_SPHERE = "half-sphere"


@dataclass
class SolverConfig:
    dt: float
    n_particles: int
    n_iterations: int
    lam: float = 1.0
    sigma: SigmaSchedule = field(default_factory=lambda: SigmaSchedule(SigmaKind.CONSTANT, 0.1))
    alpha: AlphaSchedule = field(default_factory=lambda: AlphaSchedule(AlphaKind.CONSTANT, 100.0))
    batch_size: int | None = None
    batch_partition: bool = False
    mu: float = 0.0
    n_min: int = 1
    check_every: int = 10
    scheme: SchemeKind = SchemeKind.EULER_MARUYAMA_PROJECTED
    stop_eps: float | None = 1e-10   # consensus-residual threshold, None disables
    drift_eps: float | None = None   # consensus-drift threshold, None disables
    drift_lag: int = 0
    init: InitKind = InitKind.FULL_SPHERE
    init_axis: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0 or not np.isfinite(self.dt):
            raise ValueError("dt must be finite and positive")
        if self.n_iterations < 0:
            raise ValueError("n_iterations must be >= 0")
        if self.n_particles < self.n_min or self.n_min < 1:
            raise ValueError("need n_particles >= n_min >= 1")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError("mu must lie in [0, 1]")

    def stop_rules(self) -> list[StopRule]:
        rules = [StopRule(StopKind.MAX_ITERATIONS, max_iterations=self.n_iterations)]
        if self.stop_eps is not None:
            rules.append(StopRule(StopKind.CONSENSUS_RESIDUAL, eps=self.stop_eps))
        if self.drift_eps is not None:
            rules.append(StopRule(StopKind.CONSENSUS_DRIFT, eps=self.drift_eps,
                                  lag=self.drift_lag))
        return rules


@dataclass
class RunReport:
    consensus: list[float]
    best_particle: list[float]
    best_energy: float
    iterations: int
    stop_reason: str
    success: bool | None
    sup_error: float | None
    sq_error: float | None
    sym_distance: float | None
    variance_trace: list[float]
    count_trace: list[int]
    best_energy_trace: list[float]
    consensus_error_trace: list[float] | None
    n_avg: float
    wall_time: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _error_metrics(coords: np.ndarray, target: np.ndarray | None):
    if target is None:
        return None, None, None
    diff = coords - target
    sup = float(np.max(np.abs(diff)))
    sq = float(np.sum(diff * diff))
    sym = float(min(np.linalg.norm(diff), np.linalg.norm(coords + target)))
    return sup, sq, sym


def run_once(objective: Objective, cfg: SolverConfig, seed: int | None = None) -> RunReport:
    """One deterministic KV-CBO (mu = 0) or fast KV-CBO (mu > 0) run."""
    t0 = time.perf_counter()
    run_seed = cfg.seed if seed is None else seed
    init_rng = RngStream(run_seed, STREAM_INIT)
    batch_rng = RngStream(run_seed, STREAM_BATCH)
    cull_rng = RngStream(run_seed, STREAM_CULL)
    streams = particle_streams(run_seed, cfg.n_particles)

    half_axis = cfg.init_axis if cfg.init is InitKind.HALF_SPHERE else None
    ens = Ensemble.init_uniform(objective, cfg.n_particles, init_rng, half_axis=half_axis)

    sigma = cfg.sigma
    alpha = cfg.alpha
    # mu = 0 degenerates to the plain algorithm: cull_count never shrinks the
    # ensemble and the cull rng is never consumed.
    policy = CullingPolicy(cfg.mu, cfg.n_min, cfg.check_every)
    rules = cfg.stop_rules()
    target = objective.known_minimizer

    variance_trace: list[float] = []
    count_trace: list[int] = []
    best_energy_trace: list[float] = []
    consensus_error_trace: list[float] | None = [] if target is not None else None
    history: list[np.ndarray] = []
    max_history = cfg.drift_lag + 2

    var_checkpoint = empirical_variance(ens)
    iteration = 0
    stop_reason = "max-iterations"
    cp = consensus_point(ens, alpha.current)

    while True:
        decision = should_stop(ens, cp, history, rules, iteration)
        if decision.stop:
            stop_reason = decision.reason
            break

        params = StepParams(cfg.dt, cfg.lam, sigma.current, alpha.current)
        ens, cp = advance_ensemble(ens, objective, params, cfg.scheme, streams,
                                   batch_size=cfg.batch_size,
                                   partition=cfg.batch_partition,
                                   batch_rng=batch_rng)
        iteration += 1

        history.append(np.array(cp.coords))
        if len(history) > max_history:
            history.pop(0)

        variance_trace.append(empirical_variance(ens))
        count_trace.append(ens.count)
        best_energy_trace.append(float(np.min(ens.energies)))
        if consensus_error_trace is not None:
            consensus_error_trace.append(float(np.linalg.norm(cp.coords - target)))

        if iteration % policy.check_every == 0:
            var_next = variance_trace[-1]  # pre-cull population
            new_count = cull_count(ens.count, var_checkpoint, var_next, policy)
            if new_count < ens.count:
                keep = cull_indices(ens.count, new_count, cull_rng)
                ens = Ensemble(ens.particles[keep], ens.energies[keep])
                streams = [streams[i] for i in keep]
            var_checkpoint = empirical_variance(ens)

        sigma = update_sigma(sigma, iteration)
        alpha = update_alpha(alpha)

    coords = np.asarray(cp.coords, dtype=float)
    sup, sq, sym = _error_metrics(coords, target)
    best_idx = int(np.argmin(ens.energies))
    n_avg = float(np.mean(count_trace)) if count_trace else float(cfg.n_particles)
    return RunReport(
        consensus=coords.tolist(),
        best_particle=ens.particles[best_idx].tolist(),
        best_energy=float(ens.energies[best_idx]),
        iterations=iteration,
        stop_reason=stop_reason,
        success=objective.success(coords),
        sup_error=sup,
        sq_error=sq,
        sym_distance=sym,
        variance_trace=variance_trace,
        count_trace=count_trace,
        best_energy_trace=best_energy_trace,
        consensus_error_trace=consensus_error_trace,
        n_avg=n_avg,
        wall_time=time.perf_counter() - t0,
    )
