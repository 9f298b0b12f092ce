"""Objective abstraction and the three benchmark problem families.

All objectives are immutable after construction, deterministic, and safe for
concurrent evaluation. Each objective also owns its success criterion so the
benchmark harness stays problem-agnostic.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .rng import RngStream
from .sphere import normalize, sample_uniform_sphere


class Objective:
    """Cost E: S^{d-1} -> R with optional known minimizer for benchmarking."""

    name: str = "objective"
    dimension: int = 0
    known_minimizer: np.ndarray | None = None

    def evaluate(self, v: np.ndarray) -> float:
        raise NotImplementedError

    def evaluate_many(self, vs: np.ndarray) -> np.ndarray:
        return np.array([self.evaluate(v) for v in vs])

    def success(self, consensus_coords: np.ndarray) -> bool | None:
        """Problem-specific success flag for one run; None when undefined."""
        return None


# ---------------------------------------------------------------------------
# Ackley on the sphere

@dataclass
class AckleySphere(Objective):
    """Shifted Ackley function restricted to the unit sphere; minimum 0 at the shift."""

    shift: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    amp: float = 20.0      # A
    decay: float = 0.2     # a
    freq: float = 3.0      # b
    offset: float = 20.0   # B
    name: str = "ackley"

    def __post_init__(self):
        self.shift = np.asarray(self.shift, dtype=float)
        self.dimension = self.shift.shape[0]
        self.known_minimizer = self.shift

    def evaluate(self, v: np.ndarray) -> float:
        return float(self.evaluate_many(np.asarray(v, dtype=float)[None, :])[0])

    def evaluate_many(self, vs: np.ndarray) -> np.ndarray:
        d = self.dimension
        diff = vs - self.shift
        sq = np.sum(diff * diff, axis=1)
        term1 = -self.amp * np.exp(-self.decay * np.sqrt(self.freq ** 2 / d * sq))
        term2 = -np.exp(np.mean(np.cos(2.0 * np.pi * self.freq * diff), axis=1))
        return term1 + term2 + math.e + self.offset

    def success(self, consensus_coords: np.ndarray) -> bool:
        # run successful if ||V^{alpha,E} - v*||_inf <= 1/4
        return bool(np.max(np.abs(consensus_coords - self.shift)) <= 0.25)


# ---------------------------------------------------------------------------
# Phase retrieval with zero-padding lifting

class FrameKind(enum.Enum):
    UNIFORM_SPHERE = "uniform-sphere"
    GAUSSIAN = "gaussian"


@dataclass
class PhaseRetrievalProblem:
    """Quadratic measurements lifted to the sphere S^d by one zero padding."""

    frames: np.ndarray          # (M, d+1), each row [a_i, 0]
    targets: np.ndarray         # (M,) rescaled measurements y_i / R^2
    scale: float                # R = sqrt(sum(y) / A)
    frame_bound: float          # A, smallest eigenvalue of sum a_i a_i^T
    planted_signal: np.ndarray | None = None  # z*, for scoring

    @property
    def signal_dimension(self) -> int:
        return self.frames.shape[1] - 1

    def lifted_minimizer(self) -> np.ndarray | None:
        """Unit vector [z*, sqrt(R^2 - |z*|^2)] / R when the signal is known."""
        if self.planted_signal is None:
            return None
        z = self.planted_signal
        pad2 = max(self.scale ** 2 - float(np.dot(z, z)), 0.0)
        return np.concatenate([z, [math.sqrt(pad2)]]) / self.scale


def generate_phase_retrieval(d: int, n_measurements: int, frame_kind: FrameKind,
                             noise_level: float, rng: RngStream) -> PhaseRetrievalProblem:
    """Plant a signal, draw the frame, measure, and lift onto S^d.

    The planted magnitude is drawn in [0.5, 1] so the padding coordinate is
    generically nonzero. Noisy measurements are clamped at 0 to keep the
    rescaled targets nonnegative.
    """
    if n_measurements < 1:
        raise ValueError("need at least one measurement")
    z = sample_uniform_sphere(d, rng) * rng.uniform(0.5, 1.0)
    if frame_kind is FrameKind.UNIFORM_SPHERE:
        a = np.stack([sample_uniform_sphere(d, rng) for _ in range(n_measurements)])
    elif frame_kind is FrameKind.GAUSSIAN:
        a = rng.standard_normal(n_measurements * d).reshape(n_measurements, d)
    else:
        raise ValueError(f"unknown frame kind {frame_kind!r}")
    y = (a @ z) ** 2
    if noise_level > 0:
        y = y + noise_level * rng.standard_normal(n_measurements)
        y = np.maximum(y, 0.0)
    frame_op = a.T @ a
    bound = float(np.linalg.eigvalsh(frame_op)[0])
    if bound <= 1e-12:
        raise ValueError("not a frame: frame operator is singular")
    scale = math.sqrt(float(np.sum(y)) / bound)
    frames = np.hstack([a, np.zeros((n_measurements, 1))])
    return PhaseRetrievalProblem(frames, y / scale ** 2, scale, bound, z)


def phase_retrieval_eval(v: np.ndarray, prob: PhaseRetrievalProblem) -> float:
    """Lifted empirical risk sum_i | <v, a~_i>^2 - y~_i |^2."""
    inner = prob.frames @ v
    return float(np.sum((inner ** 2 - prob.targets) ** 2))


def recover_signal(v: np.ndarray, prob: PhaseRetrievalProblem) -> np.ndarray:
    """Undo the lifting: R times the first d coordinates."""
    return prob.scale * np.asarray(v, dtype=float)[:prob.signal_dimension]


@dataclass
class PhaseRetrievalObjective(Objective):
    problem: PhaseRetrievalProblem = None  # type: ignore[assignment]
    name: str = "phase-retrieval"

    def __post_init__(self):
        self.dimension = self.problem.frames.shape[1]
        self.known_minimizer = self.problem.lifted_minimizer()

    def evaluate(self, v: np.ndarray) -> float:
        return phase_retrieval_eval(np.asarray(v, dtype=float), self.problem)

    def evaluate_many(self, vs: np.ndarray) -> np.ndarray:
        inner = vs @ self.problem.frames.T
        return np.sum((inner ** 2 - self.problem.targets) ** 2, axis=1)

    def success(self, consensus_coords: np.ndarray) -> bool | None:
        # run successful if min{|z* - z|, |z* + z|} < 0.05
        if self.problem.planted_signal is None:
            return None
        z_hat = recover_signal(normalize(consensus_coords), self.problem)
        z = self.problem.planted_signal
        return bool(min(np.linalg.norm(z - z_hat), np.linalg.norm(z + z_hat)) < 0.05)


# ---------------------------------------------------------------------------
# Robust subspace detection

@dataclass
class PointCloud:
    points: np.ndarray  # (M, d), centered
    n_inliers_per_subspace: list[int] = field(default_factory=list)
    n_outliers: int = 0

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def count(self) -> int:
        return self.points.shape[0]


class Arrangement(enum.Enum):
    NEARLY_PARALLEL = "nearly-parallel"
    RANDOM = "random"


def _tangent_direction(u: np.ndarray, rng: RngStream) -> np.ndarray:
    xi = rng.standard_normal(u.shape[0])
    t = xi - np.dot(u, xi) * u
    return normalize(t)


def _generate_subspace_points(d: int, n_subspaces: int, points_per_subspace: int,
                              noise: float, n_outliers: int, arrangement: Arrangement,
                              rng: RngStream, angular_radius: float):
    """Uncentered inlier and outlier points for a synthetic union of lines."""
    inliers = np.zeros((0, d))
    if n_subspaces > 0 and points_per_subspace > 0:
        if arrangement is Arrangement.NEARLY_PARALLEL:
            common = sample_uniform_sphere(d, rng)
            dirs = []
            for _ in range(n_subspaces):
                phi = float(rng.uniform(0.0, angular_radius))
                t = _tangent_direction(common, rng)
                dirs.append(math.cos(phi) * common + math.sin(phi) * t)
        else:
            dirs = [sample_uniform_sphere(d, rng) for _ in range(n_subspaces)]
        blocks = []
        for u in dirs:
            t = rng.uniform(-1.0, 1.0, size=points_per_subspace)
            block = t[:, None] * u
            if noise > 0:
                block = block + noise * rng.standard_normal(points_per_subspace * d).reshape(
                    points_per_subspace, d)
            blocks.append(block)
        inliers = np.vstack(blocks)
    outliers = np.zeros((0, d))
    if n_outliers > 0:
        rows = []
        for _ in range(n_outliers):
            direction = sample_uniform_sphere(d, rng)
            radius = float(rng.uniform(0.0, 1.0)) ** (1.0 / d)
            rows.append(radius * direction)
        outliers = np.vstack(rows)
    return inliers, outliers


def generate_subspace_cloud(d: int, n_subspaces: int, points_per_subspace: int,
                            noise: float, n_outliers: int, arrangement: Arrangement,
                            rng: RngStream, angular_radius: float = 0.1) -> PointCloud:
    """Synthetic union of noisy one-dimensional subspaces plus ball outliers.

    Nearly-parallel directions lie within angular_radius radians of a common
    random direction; outliers are uniform in the unit ball. The cloud is
    centered after generation.
    """
    if n_subspaces * points_per_subspace + n_outliers < 1:
        raise ValueError("point cloud would be empty")
    inliers, outliers = _generate_subspace_points(
        d, n_subspaces, points_per_subspace, noise, n_outliers, arrangement,
        rng, angular_radius)
    all_pts = np.vstack([inliers, outliers])
    all_pts = all_pts - all_pts.mean(axis=0)
    return PointCloud(all_pts, [points_per_subspace] * n_subspaces, n_outliers)


def generate_subspace_cloud_pair(d: int, n_subspaces: int, points_per_subspace: int,
                                 noise: float, n_outliers: int, arrangement: Arrangement,
                                 rng: RngStream,
                                 angular_radius: float = 0.1) -> tuple[PointCloud, PointCloud]:
    """Full cloud (with outliers) and the outlier-free cloud sharing its inliers.

    The clean twin is the reference for robust-detection scoring.
    """
    if n_subspaces * points_per_subspace < 1:
        raise ValueError("point cloud would be empty")
    inliers, outliers = _generate_subspace_points(
        d, n_subspaces, points_per_subspace, noise, n_outliers, arrangement,
        rng, angular_radius)
    full = np.vstack([inliers, outliers])
    full_cloud = PointCloud(full - full.mean(axis=0),
                            [points_per_subspace] * n_subspaces, n_outliers)
    clean_cloud = PointCloud(inliers - inliers.mean(axis=0),
                             [points_per_subspace] * n_subspaces, 0)
    return full_cloud, clean_cloud


@dataclass
class SubspaceEnergyParams:
    p: float = 2.0
    delta: float = 1e-7

    def __post_init__(self):
        if not 0.0 < self.p <= 2.0:
            raise ValueError("p must lie in (0, 2]")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")


def subspace_energy_eval(v: np.ndarray, cloud: PointCloud,
                         params: SubspaceEnergyParams) -> float:
    """Smoothed l^p projection energy sum_i (|x_i|^2 - <x_i, v>^2 + delta^2)^{p/2}.

    The residual is clamped at 0 before the power; it is mathematically
    nonnegative but floating point cancellation may dip below zero.
    """
    x = cloud.points
    resid = np.maximum(np.sum(x * x, axis=1) - (x @ v) ** 2, 0.0)
    return float(np.sum((resid + params.delta ** 2) ** (params.p / 2.0)))


def load_point_cloud(path) -> PointCloud:
    """Comma-separated numeric text, one point per row; centered on load."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # empty input warns before we raise
            points = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except ValueError as exc:
        raise ValueError(f"malformed point cloud file {path}: {exc}") from exc
    if points.size == 0:
        raise ValueError(f"empty point cloud file {path}")
    points = points - points.mean(axis=0)
    return PointCloud(points)


def save_point_cloud(cloud: PointCloud, path) -> None:
    np.savetxt(path, cloud.points, delimiter=",", fmt="%.17g")


@dataclass
class SubspaceEnergyObjective(Objective):
    cloud: PointCloud = None  # type: ignore[assignment]
    params: SubspaceEnergyParams = field(default_factory=SubspaceEnergyParams)
    oracle_direction: np.ndarray | None = None  # reference for success scoring
    name: str = "subspace-energy"

    def __post_init__(self):
        self.dimension = self.cloud.dimension
        self.known_minimizer = self.oracle_direction
        self._sq_norms = np.sum(self.cloud.points * self.cloud.points, axis=1)

    def evaluate(self, v: np.ndarray) -> float:
        return subspace_energy_eval(np.asarray(v, dtype=float), self.cloud, self.params)

    def evaluate_many(self, vs: np.ndarray) -> np.ndarray:
        proj = self.cloud.points @ vs.T  # (M, N)
        resid = np.maximum(self._sq_norms[:, None] - proj ** 2, 0.0)
        return np.sum((resid + self.params.delta ** 2) ** (self.params.p / 2.0), axis=0)

    def energy_unsmoothed(self, v: np.ndarray) -> float:
        """Energy at delta = 0, the quantity success is scored on."""
        return subspace_energy_eval(v, self.cloud, SubspaceEnergyParams(self.params.p, 0.0))

    def success(self, consensus_coords: np.ndarray) -> bool | None:
        # relative delta=0 energy gap to the oracle direction <= 1e-2
        if self.oracle_direction is None:
            return None
        v = normalize(np.asarray(consensus_coords, dtype=float))
        e_run = self.energy_unsmoothed(v)
        e_ref = self.energy_unsmoothed(self.oracle_direction)
        gap = abs(e_run - e_ref)
        denom = min(e_run, e_ref)
        if denom <= 0:
            return bool(gap <= 0)
        return bool(gap / denom <= 1e-2)
