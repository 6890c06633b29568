"""laxflow: simulation and verification toolkit for the rational
Calogero-Moser system in a harmonic trap.

The package builds the Lax matrices of the trapped inverse-square model,
integrates the equations of motion symplectically, evaluates the
conserved traces and the phase-rotating traces, checks every matrix
identity numerically, and reconstructs the exact motion from the initial
Lax data as an independent oracle.
"""

from .errors import (BadOrder, ConfigError, DegenerateSpectrum, DimensionMismatch,
                     EigenFailure, LaxflowError, NonFinite, SingularConfiguration,
                     SpanTooShort, UnsupportedModel)
from .model import (ModelParams, PhaseState, forces, hamilton_rhs, hamiltonian,
                    min_separation, potential_energy, project_center_of_mass,
                    random_state)
from .lax import (LaxSet, build_lax, check_N_identity, check_commutator_identity,
                  commutator, flow_residual_N1_N2, hermiticity_residuals,
                  lax_flow_residual, matrix_from_json, matrix_to_json)
from .invariants import (InvariantRecord, InvolutionMatrices, compute_B, compute_I,
                         compute_I0, grad_B, grad_I, involution_check,
                         phase_evolution_check, poisson_bracket, power_traces,
                         record_invariants)
from .dynamics import (SCHEMES, StepStats, Trajectory, integrate, period_check,
                       state_at, step_leapfrog, step_yoshida4)
from .exact import (SpectralSolution, compare_exact_vs_numeric,
                    exact_numeric_discrepancy, exact_momenta, exact_positions,
                    exact_state, exact_trajectory, position_matrix,
                    spectral_solution)
from .reports import (invariant_records_csv, trajectory_csv, trajectory_summary,
                      write_json, write_trajectory_csv)
from .config import GeneratorSpec, OutputSettings, RunConfig, RunSettings, load_config

__version__ = "0.1.0"

__all__ = [
    "BadOrder", "ConfigError", "DegenerateSpectrum", "DimensionMismatch",
    "EigenFailure", "LaxflowError", "NonFinite", "SingularConfiguration",
    "SpanTooShort", "UnsupportedModel",
    "ModelParams", "PhaseState", "forces", "hamilton_rhs", "hamiltonian",
    "min_separation", "potential_energy", "project_center_of_mass", "random_state",
    "LaxSet", "build_lax", "check_N_identity", "check_commutator_identity",
    "commutator", "flow_residual_N1_N2", "hermiticity_residuals",
    "lax_flow_residual", "matrix_from_json", "matrix_to_json",
    "InvariantRecord", "InvolutionMatrices", "compute_B", "compute_I", "compute_I0",
    "grad_B", "grad_I", "involution_check", "phase_evolution_check",
    "poisson_bracket", "power_traces", "record_invariants",
    "SCHEMES", "StepStats", "Trajectory", "integrate", "period_check", "state_at",
    "step_leapfrog", "step_yoshida4",
    "SpectralSolution", "compare_exact_vs_numeric", "exact_numeric_discrepancy",
    "exact_momenta", "exact_positions", "exact_state", "exact_trajectory",
    "position_matrix", "spectral_solution",
    "invariant_records_csv", "trajectory_csv", "trajectory_summary", "write_json",
    "write_trajectory_csv",
    "GeneratorSpec", "OutputSettings", "RunConfig", "RunSettings", "load_config",
    "__version__",
]
