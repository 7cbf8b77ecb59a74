# elipsoides/mve_baselines.py
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import logdet_sdp as lp
from .geometry import (
    DimensionMismatchError,
    Ellipsoid,
    Polytope,
    QuadSet,
    affine_rank,
)
from .mve_copositive import (
    Certificate,
    MveError,
    gordan_multipliers,
    quad_matrix,
    smvie_dual_objective,
    solve_polytope_mve,
    solve_quadset_mve,
)

logger = logging.getLogger(__name__)

METHODS = ("cop", "smvie", "sproc", "ktt", "exact")
DESIGN_EPS = 1e-6
CG_EPS = 1e-9
CG_TOL = 1e-7
SMVIE_GAP_TOL = 1e-5


# ======================================================================
# SMVIE (maior elipsoide inscrito, escalado por K)
# ======================================================================
@dataclass
class InscribedEllipsoid:
    """{B u + d : ||u|| <= 1}."""

    B: np.ndarray
    d: np.ndarray

    @property
    def K(self) -> int:
        return self.B.shape[0]

    def max_row_violation(self, P: Polytope) -> float:
        lhs = np.linalg.norm(P.S @ self.B, axis=1) + P.S @ self.d
        return float(np.max(lhs - P.t))

    def outer(self) -> Ellipsoid:
        """Escala por K em torno do centro: A = (K B)^-1, b = -A d."""
        KB = self.K * self.B
        A = np.linalg.inv(KB)
        A = 0.5 * (A + A.T)
        return Ellipsoid(A, -A @ self.d)

    def to_dict(self) -> dict:
        return {"B": self.B.tolist(), "d": self.d.tolist()}


@dataclass
class SmvieDual:
    Lam: np.ndarray
    rho: np.ndarray
    gap: float = float("nan")

    def objective(self, P: Polytope) -> float:
        return smvie_dual_objective(P, self.Lam, self.rho)

    def to_dict(self) -> dict:
        return {"Lam": self.Lam.tolist(), "rho": self.rho.tolist()}


def _solve_mvie(P: Polytope, settings) -> tuple[InscribedEllipsoid, lp.SdpSolution]:
    K = P.K
    p = lp.new_problem()
    B = p.add_matrix_variable("B", K)
    d = p.add_vector_variable("d", K)
    for j in range(P.J):
        s = P.S[j]
        p.add_soc_constraint(B @ s[:, None], float(P.t[j]) - s[None, :] @ d, name=f"linha{j}")
    p.set_objective(logdet=B)

    c = P.interior_point
    slack = (P.t - P.S @ c) / np.linalg.norm(P.S, axis=1)
    sol = lp.solve(p, settings=settings, x0={"B": 0.5 * slack.min() * np.eye(K), "d": c})
    sol.raise_for_status()
    return InscribedEllipsoid(sol["B"], sol["d"]), sol


def _solve_smvie_dual(P: Polytope, settings) -> tuple[SmvieDual, lp.SdpSolution]:
    J, K = P.S.shape
    p = lp.new_problem()
    Lam = p.add_matrix_variable("Lam", J, symmetric=False, cols=K)
    rho = p.add_vector_variable("rho", J)
    for j in range(J):
        p.add_soc_constraint(Lam[j, :], rho[j], name=f"soc{j}")
    p.add_linear_constraint(P.S.T @ rho, "==", 0.0, name="S'rho")
    G = (P.S.T @ Lam + Lam.T @ P.S) * -0.5
    p.set_objective(logdet=G, linear=(P.t[None, :] @ rho) * float(K))

    y = gordan_multipliers(P.S)
    if y is None:
        raise MveError("politopo ilimitado: não há rho > 0 com S'rho = 0")
    y = y * (0.5 / (y @ P.t))
    norms = np.linalg.norm(P.S, axis=1)
    Lam0 = -0.9 * y[:, None] * P.S / norms[:, None]
    sol = lp.solve(p, settings=settings, x0={"Lam": Lam0, "rho": y})
    sol.raise_for_status()
    return SmvieDual(np.asarray(sol["Lam"]).reshape(J, K), sol["rho"]), sol


def solve_smvie(P: Polytope, settings: lp.SolverSettings | None = None, with_dual: bool = True):
    """
    Devolve (E_smvie, MVIE, dual). O elipsoide externo é o MVIE com a matriz de forma
    multiplicada por K e o mesmo centro. Com with_dual=False o dual vem como None.
    """
    started = time.perf_counter()
    P.vertices
    inner, _ = _solve_mvie(P, settings)
    E = inner.outer()
    dual = None
    if with_dual:
        dual, _ = _solve_smvie_dual(P, settings)
        primal_value = -E.logdet
        dual.gap = abs(primal_value - dual.objective(P))
        if dual.gap > SMVIE_GAP_TOL:
            logger.warning("smvie: primal %.10g e dual %.10g diferem em %.3g", primal_value, dual.objective(P), dual.gap)
            raise MveError(f"smvie: gap primal-dual {dual.gap:.3g} acima de {SMVIE_GAP_TOL:g}")
    logger.info("smvie: K=%s J=%s volume=%.8g (%.2fs)", P.K, P.J, E.volume, time.perf_counter() - started)
    return E, inner, dual


# ======================================================================
# S-PROCEDURE
# ======================================================================
def solve_sproc(X: QuadSet, settings: lp.SolverSettings | None = None, return_multipliers: bool = False):
    """
    [[0, S'mu/2, A], [mu'S/2, 1 - mu't, b'], [A, b, I]]
        + sum_i lam_i [[Q'Q, Q'q, 0], [q'Q, q'q - 1, 0], [0, 0, 0]] >= 0
    com mu >= 0 e lam >= 0. Com return_multipliers=True devolve (E, mu, lam).
    """
    if not X.quads:
        raise MveError("sproc exige ao menos uma linha quadrática")
    started = time.perf_counter()
    S, t = X.base.S, X.base.t
    J, K, I = S.shape[0], X.K, len(X.quads)

    p = lp.new_problem()
    A = p.add_matrix_variable("A", K)
    b = p.add_vector_variable("b", K)
    lam = [p.add_scalar_variable(f"lam{i}", nonneg=True) for i in range(I)]
    top = lp.as_affine(np.zeros((K + 1, K + 1)))
    if J:
        mu = p.add_vector_variable("mu", J, nonneg=True)
        half = (S.T @ mu) * 0.5
        top = top + lp.bmat([[np.zeros((K, K)), half], [half.T, (t[None, :] @ mu) * -1.0]])
    for i, (Q, q) in enumerate(X.quads):
        top = top + lam[i] * quad_matrix(Q, q)
    corner = np.zeros((K + 1, K + 1))
    corner[K, K] = 1.0
    top = top + corner
    p.add_psd_constraint(lp.bmat([[top, lp.vstack([A, b.T])], [lp.hstack([A, b]), np.eye(K)]]), name="sproc")
    p.set_objective(logdet=A)

    # ponto inicial: lam somando 1/2, mu pequeno, bola grande em torno da testemunha
    lam0 = np.full(I, 0.5 / I)
    mu0 = np.full(J, 1e-4)
    Phi = corner.copy()
    for i, (Q, q) in enumerate(X.quads):
        Phi = Phi + lam0[i] * quad_matrix(Q, q)
    if J:
        h = 0.5 * S.T @ mu0
        Phi[:K, K] += h
        Phi[K, :K] += h
        Phi[K, K] -= mu0 @ t
    margin = max(float(np.linalg.eigvalsh(Phi).min()), 1e-8)
    c = X.witness
    eps = np.sqrt(margin / 2.0) / np.linalg.norm(np.append(1.0, c))
    x0 = {"A": eps * np.eye(K), "b": -eps * c, **{f"lam{i}": lam0[i] for i in range(I)}}
    if J:
        x0["mu"] = mu0

    sol = lp.solve(p, settings=settings, x0=x0)
    sol.raise_for_status()
    E = Ellipsoid(sol["A"], sol["b"])
    logger.info("sproc: K=%s J=%s I=%s volume=%.8g (%.2fs)", K, J, I, E.volume, time.perf_counter() - started)
    if return_multipliers:
        mu_val = np.asarray(sol["mu"]) if J else np.zeros(0)
        return E, mu_val, np.array([sol[f"lam{i}"] for i in range(I)])
    return E


# ======================================================================
# KTT REDUZIDO
# ======================================================================
def solve_ktt(P: Polytope, settings: lp.SolverSettings | None = None) -> Ellipsoid:
    """
    C_j >= 0 de ordem K+1, [[I, b], [b', 1]] - sum_j t_j C_j >= 0 e
    [[0, A_k], [A_k', 0]] = -sum_j S_jk C_j para cada coluna k de A.
    """
    started = time.perf_counter()
    P.vertices
    J, K = P.S.shape
    p = lp.new_problem()
    A = p.add_matrix_variable("A", K)
    b = p.add_vector_variable("b", K)
    C = [p.add_matrix_variable(f"C{j}", K + 1) for j in range(J)]
    for j, Cj in enumerate(C):
        p.add_psd_constraint(Cj, name=f"C{j}")
    total = lp.affine_sum(Cj * float(P.t[j]) for j, Cj in enumerate(C))
    p.add_psd_constraint(lp.bmat([[np.eye(K), b], [b.T, 1.0]]) - total, name="ktt")
    for k in range(K):
        col = A[:, k]
        lhs = lp.bmat([[np.zeros((K, K)), col], [col.T, 0.0]])
        rhs = lp.affine_sum(Cj * float(-P.S[j, k]) for j, Cj in enumerate(C))
        p.add_linear_constraint(lhs - rhs, "==", 0.0, name=f"coluna{k}")
    p.add_psd_constraint(A, name="A")
    p.set_objective(logdet=A)

    # C_j = gamma y_j I + eps [[0, -s_j], [-s_j', 0]], A = eps S'S, b = -eps S't
    y = gordan_multipliers(P.S)
    gamma = 0.5 / (y @ P.t)
    eps = 0.5 * gamma * float(np.min(y / np.linalg.norm(P.S, axis=1)))
    x0 = {"A": eps * P.S.T @ P.S, "b": -eps * P.S.T @ P.t}
    for j in range(J):
        Cj = gamma * y[j] * np.eye(K + 1)
        Cj[:K, K] = -eps * P.S[j]
        Cj[K, :K] = -eps * P.S[j]
        x0[f"C{j}"] = Cj

    sol = lp.solve(p, settings=settings, x0=x0)
    sol.raise_for_status()
    E = Ellipsoid(sol["A"], sol["b"])
    logger.info("ktt: K=%s J=%s volume=%.8g (%.2fs)", K, J, E.volume, time.perf_counter() - started)
    return E


# ======================================================================
# MVE EXATO DE PONTOS
# ======================================================================
@dataclass
class DesignResult:
    weights: np.ndarray
    measure: float
    iterations: int


def design_weights(points: np.ndarray, eps: float = DESIGN_EPS, max_iter: int = 100_000) -> DesignResult:
    """
    Frank-Wolfe com passos de afastamento sobre o desenho D-ótimo dos pontos
    levantados q_i = [p_i; 1], a partir dos pesos uniformes.
    Para quando max(eps+, eps-) <= eps.
    """
    X = np.asarray(points, dtype=float)
    m, K = X.shape
    n = K + 1
    Q = np.hstack([X, np.ones((m, 1))])
    u = np.full(m, 1.0 / m)
    measure = np.inf
    for it in range(1, max_iter + 1):
        M = (Q * u[:, None]).T @ Q
        g = np.einsum("ij,ij->i", Q @ np.linalg.inv(M), Q)
        j = int(np.argmax(g))
        support = u > 0
        i = int(np.flatnonzero(support)[np.argmin(g[support])])
        up = g[j] / n - 1.0
        down = 1.0 - g[i] / n
        measure = max(up, down)
        if measure <= eps:
            return DesignResult(u, float(measure), it)
        if up >= down:
            step = (g[j] - n) / (n * (g[j] - 1.0))
            u = (1.0 - step) * u
            u[j] += step
        else:
            step = min((n - g[i]) / (n * (g[i] - 1.0)), u[i] / (1.0 - u[i]))
            u = (1.0 + step) * u
            u[i] -= step
            u[u < 1e-15] = 0.0
    logger.warning("design_weights: limite de %s iterações (medida %.3g)", max_iter, measure)
    return DesignResult(u, float(measure), max_iter)


def mve_of_points(points, eps: float = DESIGN_EPS) -> Ellipsoid:
    """Elipsoide mínimo (aproximado a eps) que contém os pontos; escalado para passar pelo mais distante."""
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or len(X) < X.shape[1] + 1 or affine_rank(X) < X.shape[1]:
        raise MveError("pontos sem posto afim cheio")
    res = design_weights(X, eps)
    c = res.weights @ X
    D = X - c
    shape = X.shape[1] * (D * res.weights[:, None]).T @ D
    level = np.einsum("ij,ij->i", D @ np.linalg.inv(shape), D).max()
    return Ellipsoid.from_center_shape(c, shape * level)


def separation_oracle(P: Polytope, E: Ellipsoid) -> tuple[np.ndarray, float]:
    """Vértice que maximiza ||A v + b||^2 e o valor (> 1 quando E não contém P)."""
    V = P.vertices
    levels = E.level(V)
    j = int(np.argmax(levels))
    return V[j].copy(), float(levels[j])


def _spread_start(V: np.ndarray) -> list[int]:
    """K+1 vértices escolhidos gulosamente pela distância ao subespaço afim dos já escolhidos."""
    K = V.shape[1]
    chosen = [int(np.argmax(np.linalg.norm(V - V.mean(axis=0), axis=1)))]
    while len(chosen) < K + 1:
        base = V[chosen[0]]
        D = V[chosen[1:]] - base
        R = V - base
        if len(D):
            Qb, _ = np.linalg.qr(D.T)
            R = R - (R @ Qb) @ Qb.T
        dist = np.linalg.norm(R, axis=1)
        dist[chosen] = -1.0
        chosen.append(int(np.argmax(dist)))
    return chosen


def solve_exact_constraint_generation(P: Polytope, tol: float = CG_TOL, eps: float = CG_EPS, max_iter: int | None = None) -> Ellipsoid:
    started = time.perf_counter()
    V = P.vertices
    chosen = _spread_start(V)
    cap = max_iter or len(V)
    for it in range(cap + 1):
        E = mve_of_points(V[chosen], eps)
        v, value = separation_oracle(P, E)
        if value <= 1.0 + tol:
            logger.info(
                "exact: K=%s vértices=%s/%s volume=%.8g (%.2fs)",
                P.K, len(chosen), len(V), E.volume, time.perf_counter() - started,
            )
            return E
        j = int(np.argmin(np.abs(V - v).max(axis=1)))
        if j in chosen:
            raise MveError("geração de restrições não progrediu (vértice repetido)")
        chosen.append(j)
    raise MveError(f"geração de restrições excedeu {cap} iterações")


# ======================================================================
# SELETOR DE MÉTODO
# ======================================================================
@dataclass
class MveResult:
    method: str
    ellipsoid: Ellipsoid
    certificate: Certificate | list[Certificate] | None = None
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def objective(self) -> float:
        return -self.ellipsoid.logdet


def _polytope_only(X, method: str) -> Polytope:
    if isinstance(X, Polytope):
        return X
    if X.quads:
        raise MveError(f"método {method} só aceita politopos")
    return X.base


def run_method(X: Polytope | QuadSet, method: str, settings: lp.SolverSettings | None = None) -> MveResult:
    if method not in METHODS:
        raise MveError(f"método desconhecido: {method} (opções: {', '.join(METHODS)})")
    started = time.perf_counter()
    cert = None
    extra: dict = {}
    if method == "cop":
        if isinstance(X, QuadSet) and X.quads:
            E, cert = solve_quadset_mve(X, settings=settings)
        else:
            E, cert = solve_polytope_mve(_polytope_only(X, method), settings=settings)
    elif method == "smvie":
        E, inner, dual = solve_smvie(_polytope_only(X, method), settings=settings)
        extra = {"inscribed": inner.to_dict(), "dual": dual.to_dict() if dual else None}
    elif method == "sproc":
        if not isinstance(X, QuadSet):
            raise MveError("sproc exige ao menos uma linha quadrática (informe um QuadSet)")
        E = solve_sproc(X, settings=settings)
    elif method == "ktt":
        E = solve_ktt(_polytope_only(X, method), settings=settings)
    else:
        E = solve_exact_constraint_generation(_polytope_only(X, method))
    if E.K != X.K:
        raise DimensionMismatchError("resultado com dimensão inesperada")
    return MveResult(method, E, cert, time.perf_counter() - started, extra)
