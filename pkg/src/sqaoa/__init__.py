"""Statevector simulation of QAOA, the ZZ technique and S-QAOA with
counterdiabatic-inspired two-body interactions."""
from .ansatz import AnsatzSpec, apply_ansatz, energy, param_count
from .estimator import SQAOASolver
from .experiments import ExperimentConfig, run_experiment
from .optimizer import OptimizerConfig, optimize_qaoa_interp, run_full_pipeline
from .problems import ProblemInstance, brute_force_solve, generate

__all__ = [
    "AnsatzSpec",
    "ExperimentConfig",
    "OptimizerConfig",
    "ProblemInstance",
    "SQAOASolver",
    "apply_ansatz",
    "brute_force_solve",
    "energy",
    "generate",
    "optimize_qaoa_interp",
    "param_count",
    "run_experiment",
    "run_full_pipeline",
]
__version__ = "0.1.0"
