# elipsoides/logdet_sdp/report.py
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import SolverError
from .expressions import Affine, as_affine
from .problem import SdpProblem

OPTIMAL = "optimal"
MAX_ITERATIONS = "max-iterations"
DEGENERATE = "numerically-degenerate"
INFEASIBLE = "infeasible-detected"
STATUSES = (OPTIMAL, MAX_ITERATIONS, DEGENERATE, INFEASIBLE)

FD_STEP = 1e-6


@dataclass
class ResidualReport:
    psd_min_eig: dict[str, float] = field(default_factory=dict)
    linear_violation: float = 0.0
    equality_violation: float = 0.0
    nonneg_violation: float = 0.0
    stationarity: float = math.nan

    @property
    def min_psd_eig(self) -> float:
        return min(self.psd_min_eig.values(), default=math.inf)

    @property
    def max_violation(self) -> float:
        return max(
            max(0.0, -self.min_psd_eig),
            self.linear_violation,
            self.equality_violation,
            self.nonneg_violation,
        )

    def feasible(self, tol: float = 1e-7) -> bool:
        return self.max_violation <= tol

    def to_dict(self) -> dict:
        return {
            "psd_min_eig": dict(self.psd_min_eig),
            "min_psd_eig": self.min_psd_eig,
            "linear_violation": self.linear_violation,
            "equality_violation": self.equality_violation,
            "nonneg_violation": self.nonneg_violation,
            "stationarity": self.stationarity,
        }


@dataclass
class SdpSolution:
    status: str
    objective: float
    x: np.ndarray
    values: dict = field(default_factory=dict)
    duals: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)
    report: ResidualReport | None = None
    problem: SdpProblem | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL

    def __getitem__(self, name: str):
        return self.values[name]

    def value(self, expr) -> np.ndarray:
        expr = as_affine(expr)
        if self.problem is None:
            raise SolverError("solução sem problema associado", self)
        return expr.value(self.problem.split(self.x))

    def scalar(self, expr) -> float:
        return float(self.value(expr)[0, 0])

    def raise_for_status(self) -> "SdpSolution":
        if self.status != OPTIMAL:
            raise SolverError(f"resolvedor terminou com status {self.status}", self)
        return self

    def to_dict(self) -> dict:
        def _plain(v):
            return v.tolist() if isinstance(v, np.ndarray) else v

        return {
            "status": self.status,
            "objective": self.objective,
            "values": {k: _plain(v) for k, v in self.values.items()},
            "info": {k: _plain(v) for k, v in self.info.items()},
            "report": self.report.to_dict() if self.report else None,
        }


def _stationarity(p: SdpProblem, x: np.ndarray, duals: Mapping) -> float:
    n = x.size
    grad = np.zeros(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = FD_STEP
        grad[i] = (p.objective_value(x + e) - p.objective_value(x - e)) / (2 * FD_STEP)
    if not np.all(np.isfinite(grad)):
        return math.nan

    offsets = p.offsets()
    r = grad.copy()
    for name, blk in p.psd_blocks:
        Y = duals.get("psd", {}).get(name)
        if Y is None:
            continue
        for var, coef in blk.coefs.items():
            r[offsets[var]] -= np.einsum("rc,rcs->s", Y, coef)
    for name, g in p.inequalities:
        y = duals.get("linear", {}).get(name)
        if y is None:
            continue
        for var, coef in g.coefs.items():
            r[offsets[var]] -= np.einsum("rc,rcs->s", y, coef)
    for var, y in duals.get("nonneg", {}).items():
        r[offsets[var]] -= y

    if p.equalities:
        rows = []
        for _, e in p.equalities:
            E = np.zeros((e.shape[0] * e.shape[1], n))
            for var, coef in e.coefs.items():
                E[:, offsets[var]] = coef.reshape(-1, coef.shape[2])
            rows.append(E)
        E = np.vstack(rows)
        nu, *_ = np.linalg.lstsq(E.T, r, rcond=None)
        r = r - E.T @ nu
    return float(np.abs(r).max(initial=0.0) / max(1.0, np.abs(grad).max(initial=0.0)))


def residuals(p: SdpProblem, solution) -> ResidualReport:
    """
    Relatório de viabilidade de um ponto: autovalor mínimo de cada bloco PSD,
    violação linear/igualdade/não-negatividade e resíduo de estacionariedade
    (diferenças centrais; nan quando não há multiplicadores).
    """
    if isinstance(solution, SdpSolution):
        x = np.asarray(solution.x, dtype=float)
        duals = solution.duals
    else:
        x = p.pack(solution)
        duals = {}
    params = p.split(x)

    rep = ResidualReport()
    for name, blk in p.psd_blocks:
        rep.psd_min_eig[name] = float(np.linalg.eigvalsh(blk.value(params)).min())
    viol = 0.0
    for _, g in p.inequalities:
        viol = max(viol, float(np.max(-g.value(params), initial=0.0)))
    rep.linear_violation = max(0.0, viol)
    eq = 0.0
    for _, e in p.equalities:
        eq = max(eq, float(np.abs(e.value(params)).max(initial=0.0)))
    rep.equality_violation = eq
    nn = 0.0
    for name, var in p.variables.items():
        if var.nonneg:
            nn = max(nn, float(np.max(-params[name], initial=0.0)))
    rep.nonneg_violation = max(0.0, nn)
    if duals:
        rep.stationarity = _stationarity(p, x, duals)
    return rep


def psd_violation(expr: Affine, solution: SdpSolution) -> float:
    return float(np.linalg.eigvalsh(solution.value(expr)).min())
