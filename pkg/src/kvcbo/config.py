"""Flat JSON configuration: one named key per solver input, unknown keys rejected."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .integrators import SchemeKind
from .objectives import Arrangement, FrameKind
from .schedules import AlphaKind, AlphaSchedule, SigmaKind, SigmaSchedule
from .solver import InitKind, SolverConfig


class ConfigError(ValueError):
    """Malformed or inconsistent configuration document."""


SOLVER_KEYS = {
    "dt", "lambda", "sigma", "sigma_schedule", "sigma_tau", "alpha",
    "alpha_schedule", "alpha_factor", "alpha_max", "n_particles",
    "n_iterations", "batch_size", "batch_partition", "mu", "n_min",
    "check_every", "scheme", "stop_eps", "drift_eps", "drift_lag",
    "init", "init_axis", "seed",
}
OBJECTIVE_KEYS = {
    "objective", "dimension", "minimizer",
    # phase retrieval
    "n_measurements", "frame_kind", "noise_level",
    # subspace detection
    "n_subspaces", "points_per_subspace", "noise", "n_outliers",
    "arrangement", "angular_radius", "p", "delta", "cloud_path", "oracle",
}
ALL_KEYS = SOLVER_KEYS | OBJECTIVE_KEYS


@dataclass
class BenchmarkConfig:
    solver: SolverConfig
    objective_spec: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _enum_lookup(enum_cls, value, key):
    for member in enum_cls:
        if member.value == value:
            return member
    valid = ", ".join(m.value for m in enum_cls)
    raise ConfigError(f"invalid {key} {value!r}; expected one of: {valid}")


def solver_config_from_dict(doc: dict) -> SolverConfig:
    unknown = set(doc) - ALL_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for required in ("dt", "n_particles", "n_iterations"):
        if required not in doc:
            raise ConfigError(f"missing required key {required!r}")

    sigma_kind = _enum_lookup(SigmaKind, doc.get("sigma_schedule", "constant"), "sigma_schedule")
    sigma0 = float(doc.get("sigma", 0.1))
    sigma = SigmaSchedule(sigma_kind, sigma0, tau=float(doc.get("sigma_tau", 2.0)),
                          sigma0=sigma0)
    alpha_kind = _enum_lookup(AlphaKind, doc.get("alpha_schedule", "constant"), "alpha_schedule")
    alpha = AlphaSchedule(alpha_kind, float(doc.get("alpha", 100.0)),
                          factor=float(doc.get("alpha_factor", 2.0)),
                          alpha_max=float(doc.get("alpha_max", 1e15)))
    try:
        return SolverConfig(
            dt=float(doc["dt"]),
            n_particles=int(doc["n_particles"]),
            n_iterations=int(doc["n_iterations"]),
            lam=float(doc.get("lambda", 1.0)),
            sigma=sigma,
            alpha=alpha,
            batch_size=int(doc["batch_size"]) if doc.get("batch_size") is not None else None,
            batch_partition=bool(doc.get("batch_partition", False)),
            mu=float(doc.get("mu", 0.0)),
            n_min=int(doc.get("n_min", 1)),
            check_every=int(doc.get("check_every", 10)),
            scheme=_enum_lookup(SchemeKind, doc.get("scheme", "euler-maruyama"), "scheme"),
            stop_eps=float(doc["stop_eps"]) if doc.get("stop_eps") is not None else None,
            drift_eps=float(doc["drift_eps"]) if doc.get("drift_eps") is not None else None,
            drift_lag=int(doc.get("drift_lag", 0)),
            init=_enum_lookup(InitKind, doc.get("init", "full-sphere"), "init"),
            init_axis=int(doc.get("init_axis", 0)),
            seed=int(doc.get("seed", 0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def objective_spec_from_dict(doc: dict) -> dict:
    spec = {k: doc[k] for k in OBJECTIVE_KEYS if k in doc}
    if "objective" not in spec:
        raise ConfigError("missing required key 'objective'")
    if "frame_kind" in spec:
        spec["frame_kind"] = _enum_lookup(FrameKind, spec["frame_kind"], "frame_kind")
    if "arrangement" in spec:
        spec["arrangement"] = _enum_lookup(Arrangement, spec["arrangement"], "arrangement")
    return spec


def load_config(path) -> BenchmarkConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    return BenchmarkConfig(solver=solver_config_from_dict(doc),
                           objective_spec=objective_spec_from_dict(doc),
                           raw=doc)


def config_echo(cfg: SolverConfig) -> dict:
    return {
        "dt": cfg.dt, "lambda": cfg.lam,
        "sigma": cfg.sigma.current, "sigma_schedule": cfg.sigma.kind.value,
        "sigma_tau": cfg.sigma.tau,
        "alpha": cfg.alpha.current, "alpha_schedule": cfg.alpha.kind.value,
        "alpha_factor": cfg.alpha.factor, "alpha_max": cfg.alpha.alpha_max,
        "n_particles": cfg.n_particles, "n_iterations": cfg.n_iterations,
        "batch_size": cfg.batch_size, "batch_partition": cfg.batch_partition,
        "mu": cfg.mu, "n_min": cfg.n_min, "check_every": cfg.check_every,
        "scheme": cfg.scheme.value, "stop_eps": cfg.stop_eps,
        "drift_eps": cfg.drift_eps, "drift_lag": cfg.drift_lag,
        "init": cfg.init.value, "init_axis": cfg.init_axis, "seed": cfg.seed,
    }
