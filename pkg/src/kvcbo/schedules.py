"""Adaptive parameter schedules, variance-driven particle culling, stopping rules."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .consensus import ConsensusPoint
from .ensemble import Ensemble
from .rng import RngStream


# ---------------------------------------------------------------------------
# sigma / alpha schedules

class SigmaKind(enum.Enum):
    CONSTANT = "constant"
    GEOMETRIC_DECAY = "geometric"
    LOG_DECAY = "log"


@dataclass
class SigmaSchedule:
    kind: SigmaKind
    current: float
    tau: float = 1.0       # geometric decay factor, > 1
    sigma0: float = 1.0    # reference value for the log rule

    def __post_init__(self):
        if self.current < 0:
            raise ValueError("sigma must be nonnegative")
        if self.kind is SigmaKind.GEOMETRIC_DECAY and self.tau <= 1:
            raise ValueError("geometric decay needs tau > 1")


def update_sigma(s: SigmaSchedule, iteration: int) -> SigmaSchedule:
    """Advance the noise level by one iteration.

    The log rule sigma_{n+1} = sigma_n / (sigma0 * ln(n+1)) would increase
    sigma while sigma0 * ln(n+1) < 1, so it only kicks in once that factor
    reaches 1; natural log is used.
    """
    if s.kind is SigmaKind.CONSTANT:
        return s
    if s.kind is SigmaKind.GEOMETRIC_DECAY:
        return replace(s, current=s.current / s.tau)
    factor = s.sigma0 * math.log(iteration + 1)
    if factor < 1.0:
        return s
    return replace(s, current=s.current / factor)


class AlphaKind(enum.Enum):
    CONSTANT = "constant"
    GEOMETRIC_RAMP = "geometric"


@dataclass
class AlphaSchedule:
    kind: AlphaKind
    current: float
    factor: float = 1.0
    alpha_max: float = math.inf

    def __post_init__(self):
        if self.current < 0:
            raise ValueError("alpha must be nonnegative")
        if self.kind is AlphaKind.GEOMETRIC_RAMP and self.factor <= 1:
            raise ValueError("geometric ramp needs factor > 1")


def update_alpha(a: AlphaSchedule) -> AlphaSchedule:
    if a.kind is AlphaKind.CONSTANT:
        return a
    return replace(a, current=min(a.current * a.factor, a.alpha_max))


# ---------------------------------------------------------------------------
# variance and culling

def empirical_variance(ensemble: Ensemble) -> float:
    """(1/N) sum_j |V_j - Vbar|^2 with the coordinate-wise (non-renormalized) mean."""
    mean = ensemble.particles.mean(axis=0)
    diff = ensemble.particles - mean
    return float(np.sum(diff * diff) / ensemble.count)


@dataclass
class CullingPolicy:
    mu: float
    n_min: int = 1
    check_every: int = 10

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError("mu must lie in [0, 1]")
        if self.n_min < 1:
            raise ValueError("n_min must be >= 1")
        if self.check_every < 1:
            raise ValueError("check_every must be >= 1")


def cull_count(n_current: int, var_prev: float, var_next: float,
               policy: CullingPolicy) -> int:
    """New particle count N(1 + mu (var_next - var_prev) / var_prev), floored at n_min.

    Non-monotone variance steps (var_next >= var_prev) skip culling entirely.
    var_prev <= 0 means consensus is already reached; nothing is discarded.
    """
    if n_current < 1:
        raise ValueError("n_current must be >= 1")
    if var_prev <= 0:
        return max(policy.n_min, n_current)
    if var_next >= var_prev:
        return n_current
    target = int(n_current * (1.0 + policy.mu * (var_next - var_prev) / var_prev))
    return max(policy.n_min, target)


def cull_ensemble(ensemble: Ensemble, target: int, rng: RngStream) -> Ensemble:
    """Keep `target` particles chosen uniformly without replacement.

    Survivors keep their state and cached energies bitwise; survivor order
    follows the original index order.
    """
    n = ensemble.count
    if not 1 <= target <= n:
        raise ValueError(f"cull target {target} out of range [1, {n}]")
    if target == n:
        return ensemble
    keep = np.sort(rng.subset(n, target))
    return Ensemble(ensemble.particles[keep], ensemble.energies[keep])


def cull_indices(n: int, target: int, rng: RngStream) -> np.ndarray:
    """Surviving indices for a cull from n down to target, sorted."""
    return np.sort(rng.subset(n, target))


# ---------------------------------------------------------------------------
# stopping rules

class StopKind(enum.Enum):
    CONSENSUS_RESIDUAL = "consensus-residual"
    CONSENSUS_DRIFT = "consensus-drift"
    MAX_ITERATIONS = "max-iterations"


@dataclass
class StopRule:
    kind: StopKind
    eps: float = 0.0
    lag: int = 0
    max_iterations: int = 0

    def __post_init__(self):
        if self.kind is not StopKind.MAX_ITERATIONS and self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.lag < 0:
            raise ValueError("lag must be >= 0")
        if self.kind is StopKind.MAX_ITERATIONS and self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")


@dataclass
class StopDecision:
    stop: bool
    reason: str | None = None


def should_stop(ensemble: Ensemble, v_alpha: ConsensusPoint,
                history: list[np.ndarray], rules: list[StopRule],
                iteration: int) -> StopDecision:
    """Any-of combination of the active stopping rules.

    history is the trailing buffer of consensus points, most recent last
    (including v_alpha); the drift rule is inactive until it holds lag + 2 entries.
    """
    for rule in rules:
        if rule.kind is StopKind.MAX_ITERATIONS:
            if iteration >= rule.max_iterations:
                return StopDecision(True, "max-iterations")
        elif rule.kind is StopKind.CONSENSUS_RESIDUAL:
            residual = float(np.mean(np.sqrt(np.sum(
                (ensemble.particles - v_alpha.coords) ** 2, axis=1))))
            if residual <= rule.eps:
                return StopDecision(True, "consensus-residual")
        elif rule.kind is StopKind.CONSENSUS_DRIFT:
            if len(history) >= rule.lag + 2:
                drift = float(np.sqrt(np.sum(
                    (history[-1] - history[-(rule.lag + 2)]) ** 2)))
                if drift <= rule.eps:
                    return StopDecision(True, "consensus-drift")
    return StopDecision(False)
