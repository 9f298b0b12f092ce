"""Monte Carlo benchmark harness: replicated runs, scoring, oracles, reports."""

from __future__ import annotations

import csv
import json
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import BenchmarkConfig, ConfigError, config_echo
from .objectives import (AckleySphere, Arrangement, FrameKind, Objective,
                         PhaseRetrievalObjective, PointCloud, SubspaceEnergyObjective,
                         SubspaceEnergyParams, generate_phase_retrieval,
                         generate_subspace_cloud_pair, load_point_cloud,
                         subspace_energy_eval)
from .rng import RngStream
from .solver import RunReport, SolverConfig, run_once
from .sphere import normalize

# Stream id for per-run problem-instance generation (frames, clouds),
# independent of the solver's own streams.
STREAM_PROBLEM = 7

WORKERS_ENV = "KVCBO_WORKERS"


# ---------------------------------------------------------------------------
# SVD oracle

class PowerIterationError(RuntimeError):
    """Power iteration failed to converge (near-degenerate top eigenvalues)."""


def svd_top_direction(cloud: PointCloud, tol: float = 1e-12, max_iter: int = 10000,
                      rng: RngStream | None = None) -> np.ndarray:
    """Dominant right-singular direction of the point matrix via power iteration.

    Sign-normalized so the first nonzero coordinate is positive.
    """
    if cloud.count < 1:
        raise ValueError("empty point cloud")
    if rng is None:
        rng = RngStream(0, 0)
    x_mat = cloud.points
    gram = x_mat.T @ x_mat
    v = normalize(rng.standard_normal(cloud.dimension))
    for _ in range(max_iter):
        w = normalize(gram @ v)
        if np.linalg.norm(w - v) < tol or np.linalg.norm(w + v) < tol:
            v = w
            break
        v = w
    else:
        raise PowerIterationError(f"no convergence within {max_iter} iterations")
    nz = np.flatnonzero(np.abs(v) > 0)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def score_subspace_run(v: np.ndarray, oracle: np.ndarray, cloud: PointCloud,
                       params: SubspaceEnergyParams) -> dict:
    """Sign-symmetric distance plus delta = 0 energy comparison against the oracle."""
    v = normalize(np.asarray(v, dtype=float))
    raw = SubspaceEnergyParams(params.p, 0.0)
    e_run = subspace_energy_eval(v, cloud, raw)
    e_ref = subspace_energy_eval(oracle, cloud, raw)
    denom = min(e_run, e_ref)
    gap = abs(e_run - e_ref)
    return {
        "sym_distance": float(min(np.linalg.norm(v - oracle), np.linalg.norm(v + oracle))),
        "energy": e_run,
        "energy_oracle": e_ref,
        "relative_gap": gap / denom if denom > 0 else (0.0 if gap == 0 else float("inf")),
    }


# ---------------------------------------------------------------------------
# Objective factories (picklable, per-run regeneration when randomized)

@dataclass
class FixedObjectiveFactory:
    objective: Objective

    def __call__(self, run_seed: int) -> Objective:
        return self.objective


@dataclass
class PhaseRetrievalFactory:
    dimension: int
    n_measurements: int
    frame_kind: FrameKind = FrameKind.GAUSSIAN
    noise_level: float = 0.0

    def __call__(self, run_seed: int) -> Objective:
        rng = RngStream(run_seed, STREAM_PROBLEM)
        problem = generate_phase_retrieval(self.dimension, self.n_measurements,
                                           self.frame_kind, self.noise_level, rng)
        return PhaseRetrievalObjective(problem)


@dataclass
class SubspaceFactory:
    dimension: int
    n_subspaces: int = 25
    points_per_subspace: int = 100
    noise: float = 0.01
    n_outliers: int = 0
    arrangement: Arrangement = Arrangement.NEARLY_PARALLEL
    angular_radius: float = 0.1
    p: float = 2.0
    delta: float = 1e-7
    oracle_on_clean: bool = False  # score against SVD of the outlier-free twin

    def __call__(self, run_seed: int) -> Objective:
        rng = RngStream(run_seed, STREAM_PROBLEM)
        full, clean = generate_subspace_cloud_pair(
            self.dimension, self.n_subspaces, self.points_per_subspace, self.noise,
            self.n_outliers, self.arrangement, rng, self.angular_radius)
        oracle_cloud = clean if self.oracle_on_clean else full
        oracle = svd_top_direction(oracle_cloud, rng=RngStream(run_seed, STREAM_PROBLEM + 1))
        return SubspaceEnergyObjective(full, SubspaceEnergyParams(self.p, self.delta),
                                       oracle_direction=oracle)


def build_factory(bench_cfg: BenchmarkConfig):
    """Factory from the objective section of a config document."""
    spec = bench_cfg.objective_spec
    kind = spec["objective"]
    if kind == "ackley":
        if "minimizer" in spec:
            shift = np.asarray(spec["minimizer"], dtype=float)
        else:
            d = int(spec.get("dimension", 3))
            shift = np.zeros(d)
            shift[-1] = 1.0
        return FixedObjectiveFactory(AckleySphere(shift=shift))
    if kind == "phase-retrieval":
        return PhaseRetrievalFactory(
            dimension=int(spec["dimension"]),
            n_measurements=int(spec["n_measurements"]),
            frame_kind=spec.get("frame_kind", FrameKind.GAUSSIAN),
            noise_level=float(spec.get("noise_level", 0.0)))
    if kind == "subspace":
        return SubspaceFactory(
            dimension=int(spec["dimension"]),
            n_subspaces=int(spec.get("n_subspaces", 25)),
            points_per_subspace=int(spec.get("points_per_subspace", 100)),
            noise=float(spec.get("noise", 0.01)),
            n_outliers=int(spec.get("n_outliers", 0)),
            arrangement=spec.get("arrangement", Arrangement.NEARLY_PARALLEL),
            angular_radius=float(spec.get("angular_radius", 0.1)),
            p=float(spec.get("p", 2.0)),
            delta=float(spec.get("delta", 1e-7)),
            oracle_on_clean=spec.get("oracle", "svd") == "clean-svd")
    if kind == "point-cloud-file":
        cloud = load_point_cloud(spec["cloud_path"])
        params = SubspaceEnergyParams(float(spec.get("p", 2.0)),
                                      float(spec.get("delta", 1e-7)))
        oracle = svd_top_direction(cloud) if spec.get("oracle", "svd") == "svd" else None
        return FixedObjectiveFactory(SubspaceEnergyObjective(cloud, params,
                                                             oracle_direction=oracle))
    raise ConfigError(f"unknown objective kind {kind!r}")


# ---------------------------------------------------------------------------
# Monte Carlo replication

@dataclass
class AggregateReport:
    n_runs: int
    success_rate: float
    metrics: dict
    mean_n_avg: float
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _mc_worker(args) -> RunReport:
    factory, cfg, run_seed = args
    return run_once(factory(run_seed), cfg, seed=run_seed)


def _metric_summary(values: list[float | None], successes: list[bool | None]) -> dict:
    present = [v for v in values if v is not None]
    ok = [v for v, s in zip(values, successes) if v is not None and s]
    def stats(xs):
        if not xs:
            return {"mean": None, "median": None}
        return {"mean": statistics.fmean(xs), "median": statistics.median(xs)}
    return {"all": stats(present), "successful": stats(ok)}


def worker_count() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_monte_carlo(factory, cfg: SolverConfig, n_runs: int, base_seed: int,
                    workers: int | None = None,
                    return_reports: bool = False):
    """n_runs independent runs with seeds base_seed + index, aggregated.

    The objective instance is regenerated per run when the factory is
    randomized (fresh frames / clouds); aggregation is order-independent.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if workers is None:
        workers = worker_count()
    jobs = [(factory, cfg, base_seed + i) for i in range(n_runs)]
    if workers > 1 and n_runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_mc_worker, jobs))
    else:
        reports = [_mc_worker(job) for job in jobs]

    successes = [r.success for r in reports]
    n_success = sum(1 for s in successes if s)
    metrics = {
        name: _metric_summary([getattr(r, name) for r in reports], successes)
        for name in ("sup_error", "sq_error", "sym_distance")
    }
    agg = AggregateReport(
        n_runs=n_runs,
        success_rate=n_success / n_runs,
        metrics=metrics,
        mean_n_avg=statistics.fmean(r.n_avg for r in reports),
        config=config_echo(cfg),
    )
    if return_reports:
        return agg, reports
    return agg


# ---------------------------------------------------------------------------
# Report emission

class ReportIOError(RuntimeError):
    """Report destination is not writable."""


def emit_report(report, fmt: str, path) -> None:
    """Write a RunReport or AggregateReport as JSON or CSV.

    CSV for a single run is one row per iteration (plot-ready traces); for an
    aggregate it is a single summary row.
    """
    path = Path(path)
    if not path.parent.is_dir():
        raise ReportIOError(f"directory {path.parent} does not exist")
    if fmt == "json":
        path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        return
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if isinstance(report, RunReport):
            has_err = report.consensus_error_trace is not None
            header = ["iteration", "variance", "n_particles", "best_energy"]
            if has_err:
                header.append("consensus_error")
            writer.writerow(header)
            for i in range(len(report.variance_trace)):
                row = [i + 1, repr(report.variance_trace[i]), report.count_trace[i],
                       repr(report.best_energy_trace[i])]
                if has_err:
                    row.append(repr(report.consensus_error_trace[i]))
                writer.writerow(row)
        else:
            writer.writerow(["n_runs", "success_rate", "mean_n_avg"])
            writer.writerow([report.n_runs, repr(report.success_rate),
                             repr(report.mean_n_avg)])
