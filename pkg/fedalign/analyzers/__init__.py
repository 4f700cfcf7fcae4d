from .oracle import OracleError, OracleSolution, WeightedObjective, minimize, solve_oracles
from .theory import (
    DiagnosticError,
    TheoryDiagnostics,
    gamma_lr,
    compute_gamma,
    theta_T,
    rho_T,
    theorem_constants,
    bound,
    compute_diagnostics,
    average_diagnostics,
)
from .gradient_noise import estimate_noise

__all__ = [
    "OracleError",
    "OracleSolution",
    "WeightedObjective",
    "minimize",
    "solve_oracles",
    "DiagnosticError",
    "TheoryDiagnostics",
    "gamma_lr",
    "compute_gamma",
    "theta_T",
    "rho_T",
    "theorem_constants",
    "bound",
    "compute_diagnostics",
    "average_diagnostics",
    "estimate_noise",
]
