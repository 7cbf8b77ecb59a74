# elipsoides/logdet_sdp/__init__.py
"""
Resolvedor denso para problemas do tipo
    minimizar -logdet(F(x)) + c'x
sujeito a blocos PSD afins, linhas SOC, restrições lineares e variáveis >= 0.
"""
from .barrier import compile_problem, gradient_error, solve
from .errors import ModelError, SdpError, SolverError
from .expressions import Affine, affine_sum, as_affine, bmat, hstack, vstack
from .problem import SdpProblem, Variable, new_problem
from .report import (
    DEGENERATE,
    INFEASIBLE,
    MAX_ITERATIONS,
    OPTIMAL,
    ResidualReport,
    SdpSolution,
    residuals,
)
from .settings import SolverSettings

__all__ = [
    "Affine",
    "DEGENERATE",
    "INFEASIBLE",
    "MAX_ITERATIONS",
    "ModelError",
    "OPTIMAL",
    "ResidualReport",
    "SdpError",
    "SdpProblem",
    "SdpSolution",
    "SolverError",
    "SolverSettings",
    "Variable",
    "affine_sum",
    "as_affine",
    "bmat",
    "compile_problem",
    "gradient_error",
    "hstack",
    "new_problem",
    "residuals",
    "solve",
    "vstack",
]
