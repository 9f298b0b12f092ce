"""Derivative-free global optimization on the unit hypersphere.

Stochastic consensus-based particle dynamics with projected SDE integrators,
adaptive parameter schedules, variance-driven particle culling, and a
Monte Carlo benchmark harness.
"""

from .consensus import ConsensusPoint, consensus_point, consensus_point_batch
from .ensemble import Ensemble
from .integrators import (DegenerateStepError, SchemeKind, StepParams,
                          advance_ensemble, step_euler_maruyama, step_semi_implicit)
from .objectives import (AckleySphere, Arrangement, FrameKind, Objective,
                         PhaseRetrievalObjective, PhaseRetrievalProblem, PointCloud,
                         SubspaceEnergyObjective, SubspaceEnergyParams,
                         generate_phase_retrieval, generate_subspace_cloud,
                         load_point_cloud, phase_retrieval_eval, recover_signal,
                         subspace_energy_eval)
from .rng import RngStream
from .schedules import (AlphaKind, AlphaSchedule, CullingPolicy, SigmaKind,
                        SigmaSchedule, StopKind, StopRule, cull_count, cull_ensemble,
                        empirical_variance, should_stop, update_alpha, update_sigma)
from .solver import InitKind, RunReport, SolverConfig, run_once
from .bench import (AggregateReport, run_monte_carlo, score_subspace_run,
                    svd_top_direction, emit_report)
from .sphere import (gaussian_increment, normalize, project_tangent,
                     sample_uniform_halfsphere, sample_uniform_sphere)

__version__ = "0.1.0"
