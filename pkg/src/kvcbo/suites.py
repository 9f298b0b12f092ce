"""Preconfigured benchmark suites for the three problem families."""

from __future__ import annotations

import numpy as np

from .bench import (AggregateReport, PhaseRetrievalFactory, FixedObjectiveFactory,
                    SubspaceFactory, run_monte_carlo)
from .objectives import AckleySphere, FrameKind
from .schedules import AlphaKind, AlphaSchedule, SigmaKind, SigmaSchedule
from .solver import InitKind, SolverConfig


def _const(sigma: float, alpha: float) -> dict:
    return dict(sigma=SigmaSchedule(SigmaKind.CONSTANT, sigma),
                alpha=AlphaSchedule(AlphaKind.CONSTANT, alpha))


def _alpha_ramp(alpha0: float, alpha_max: float, n_iterations: int) -> AlphaSchedule:
    # reach alpha_max in roughly half the iteration budget
    factor = (alpha_max / alpha0) ** (2.0 / max(n_iterations, 2))
    return AlphaSchedule(AlphaKind.GEOMETRIC_RAMP, alpha0, factor=factor,
                         alpha_max=alpha_max)


def _ackley_shift(d: int) -> np.ndarray:
    shift = np.zeros(d)
    shift[-1] = 1.0
    return shift


def suite_ackley_d3(n_runs: int = 100, base_seed: int = 1000,
                    workers: int | None = None) -> dict[str, AggregateReport]:
    cfg = SolverConfig(dt=0.1, n_particles=50, n_iterations=250,
                       init=InitKind.HALF_SPHERE, init_axis=2,
                       **_const(sigma=0.7, alpha=500.0))
    factory = FixedObjectiveFactory(AckleySphere(shift=_ackley_shift(3)))
    return {"d3": run_monte_carlo(factory, cfg, n_runs, base_seed, workers=workers)}


def suite_ackley_d20(n_runs: int = 50, base_seed: int = 2000,
                     workers: int | None = None) -> dict[str, AggregateReport]:
    factory = FixedObjectiveFactory(AckleySphere(shift=_ackley_shift(20)))
    # plain variant: N=200, M=100
    plain = SolverConfig(dt=0.05, n_particles=200, n_iterations=2000, batch_size=100,
                         init=InitKind.HALF_SPHERE, init_axis=19,
                         **_const(sigma=0.3, alpha=5e4))
    # fast variant: mu=0.3, N0=400, M=150
    fast = SolverConfig(dt=0.05, n_particles=400, n_iterations=2000, batch_size=150,
                        mu=0.3, n_min=10, check_every=10,
                        init=InitKind.HALF_SPHERE, init_axis=19,
                        **_const(sigma=0.3, alpha=5e4))
    return {
        "plain": run_monte_carlo(factory, plain, n_runs, base_seed, workers=workers),
        "fast": run_monte_carlo(factory, fast, n_runs, base_seed, workers=workers),
    }


def suite_phase_retrieval_d32(n_runs: int = 25, base_seed: int = 3000,
                              workers: int | None = None) -> dict[str, AggregateReport]:
    d = 32
    n_iterations = 600
    out = {}
    for label, m in (("M=d", d), ("M=8d", 8 * d)):
        cfg = SolverConfig(dt=0.1, n_particles=2000, n_iterations=n_iterations,
                           sigma=SigmaSchedule(SigmaKind.CONSTANT, 0.2),
                           alpha=_alpha_ramp(2000.0, 1e15, n_iterations),
                           init=InitKind.FULL_SPHERE)
        factory = PhaseRetrievalFactory(dimension=d, n_measurements=m,
                                        frame_kind=FrameKind.GAUSSIAN)
        out[label] = run_monte_carlo(factory, cfg, n_runs, base_seed, workers=workers)
    return out


def suite_subspace_p2(n_runs: int = 100, base_seed: int = 4000,
                      workers: int | None = None) -> dict[str, AggregateReport]:
    cfg = SolverConfig(dt=0.25, n_particles=1000, n_iterations=2000,
                       mu=0.3, n_min=100, check_every=10,
                       **_const(sigma=0.3, alpha=2e15))
    factory = SubspaceFactory(dimension=10, p=2.0, delta=0.0)
    return {"p2": run_monte_carlo(factory, cfg, n_runs, base_seed, workers=workers)}


def suite_subspace_p1(n_runs: int = 50, base_seed: int = 5000,
                      workers: int | None = None) -> dict[str, AggregateReport]:
    cfg = SolverConfig(dt=0.25, n_particles=1000, n_iterations=2000,
                       mu=0.3, n_min=100, check_every=10,
                       **_const(sigma=0.3, alpha=2e15))
    factory = SubspaceFactory(dimension=10, p=1.0, delta=1e-7, n_outliers=250,
                              oracle_on_clean=True)
    return {"p1": run_monte_carlo(factory, cfg, n_runs, base_seed, workers=workers)}


SUITES = {
    "ackley-d3": suite_ackley_d3,
    "ackley-d20": suite_ackley_d20,
    "phase-retrieval-d32": suite_phase_retrieval_d32,
    "subspace-p2": suite_subspace_p2,
    "subspace-p1": suite_subspace_p1,
}
