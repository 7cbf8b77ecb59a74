# elipsoides/dro.py
"""
Problemas de dois estágios com recurso aleatório e ambiguidade por momentos
    Q = {Q : E[xi] = mu, E[xi xi'] <= Sigma, suporte em Xi}.

A regra de decisão é linear por partes sobre células de Voronoi de Xi; cada
célula ganha um elipsoide de cobertura (MVE copositivo) cujo termo lambda*J
aperta as LMIs do S-lemma. O valor da SDP é um limitante superior do problema.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import logdet_sdp as lp
from .conf import experiment_setting
from .geometry import (
    VERTEX_LIMIT,
    Ellipsoid,
    PartitionFamily,
    Polytope,
    chebyshev_center,
    is_bounded,
    voronoi_partition,
)
from .instances import box, unit_box
from .mve_copositive import solve_polytope_mve
from .parallel import STREAM_CORRELATION, STREAM_INSTANCE, STREAM_SEEDS, make_rng, parallel_map

logger = logging.getLogger(__name__)

MODES = ("pwl", "pws", "ldr", "pwl2")
MOMENT_TOL = 1e-9
COVER_TOL = 1e-6
CHECK_TOL = 1e-6

INVENTORY_BUDGET = 30.0
INVENTORY_EPS = 0.05
FULL_SCALE_N = 7
FULL_SCALE_J = 4
DESK_N = 3
DESK_J = 2


class DroError(Exception):
    """Instância, partição ou política de DRO inválida."""


class RestrictionInfeasibleError(DroError):
    """A SDP da regra linear por partes ficou inviável (não prova inviabilidade do problema original)."""


# ======================================================================
# INSTÂNCIA
# ======================================================================
@dataclass
class RecourseRow:
    """
    Uma restrição de recurso T(x)'xi + h(x) <= (W xi + w)'y(xi),
    com T(x) = T0 + Tx x e h(x) = h0 + hx'x.
    """

    W: np.ndarray
    w: np.ndarray
    T0: np.ndarray
    Tx: np.ndarray
    h0: float = 0.0
    hx: np.ndarray | None = None

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float)
        self.w = np.asarray(self.w, dtype=float).reshape(-1)
        self.T0 = np.asarray(self.T0, dtype=float).reshape(-1)
        self.Tx = np.asarray(self.Tx, dtype=float).reshape(self.T0.size, -1)
        self.h0 = float(self.h0)
        n1 = self.Tx.shape[1]
        self.hx = np.zeros(n1) if self.hx is None else np.asarray(self.hx, dtype=float).reshape(n1)

    def T(self, x: np.ndarray) -> np.ndarray:
        return self.T0 + self.Tx @ x

    def h(self, x: np.ndarray) -> float:
        return float(self.h0 + self.hx @ x)

    def slack(self, x: np.ndarray, Y: np.ndarray, y: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """(W xi + w)'(Y xi + y) - T(x)'xi - h(x) para cada linha de xi (>= 0 é viável)."""
        Xi = np.atleast_2d(xi)
        rhs = np.sum((Xi @ self.W.T + self.w) * (Xi @ Y.T + y), axis=1)
        return rhs - Xi @ self.T(x) - self.h(x)

    def to_dict(self) -> dict:
        return {
            "W": self.W.tolist(),
            "w": self.w.tolist(),
            "T0": self.T0.tolist(),
            "Tx": self.Tx.tolist(),
            "h0": self.h0,
            "hx": self.hx.tolist(),
        }


@dataclass
class DroInstance:
    """
    min c'x + sup_Q E[(D xi + d)'y(xi)]  s.a.  X_A x <= X_b e as linhas de recurso em todo xi do suporte.
    fixed_rule fixa (Y, y) como constantes; ellipsoid é o elipsoide global usado quando J = 1.
    """

    c: np.ndarray
    D: np.ndarray
    d: np.ndarray
    rows: list[RecourseRow]
    support: Polytope
    mu: np.ndarray
    Sigma: np.ndarray
    X_A: np.ndarray | None = None
    X_b: np.ndarray | None = None
    fixed_rule: tuple[np.ndarray, np.ndarray] | None = None
    ellipsoid: Ellipsoid | None = None
    name: str = "dro"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        self.D = np.asarray(self.D, dtype=float).reshape(-1, self.support.K)
        self.d = np.asarray(self.d, dtype=float).reshape(self.D.shape[0])
        self.mu = np.asarray(self.mu, dtype=float).reshape(self.support.K)
        self.Sigma = np.asarray(self.Sigma, dtype=float).reshape(self.support.K, self.support.K)
        if self.X_A is not None:
            self.X_A = np.asarray(self.X_A, dtype=float).reshape(-1, self.N1)
            self.X_b = np.asarray(self.X_b, dtype=float).reshape(self.X_A.shape[0])
        if not self.rows:
            raise DroError("instância sem restrições de recurso")
        for l, row in enumerate(self.rows):
            if row.W.shape != (self.N2, self.K) or row.w.size != self.N2:
                raise DroError(f"linha {l}: W {row.W.shape} / w {row.w.shape} incompatíveis com N2={self.N2}, K={self.K}")
            if row.T0.size != self.K or row.Tx.shape[1] != self.N1:
                raise DroError(f"linha {l}: T incompatível com K={self.K}, N1={self.N1}")
        if self.fixed_rule is not None:
            Y, y = (np.asarray(v, dtype=float) for v in self.fixed_rule)
            if Y.shape != (self.N2, self.K) or y.reshape(-1).size != self.N2:
                raise DroError("regra fixa com dimensões erradas")
            self.fixed_rule = (Y, y.reshape(-1))
        cov = self.Sigma - np.outer(self.mu, self.mu)
        if np.linalg.eigvalsh(0.5 * (cov + cov.T)).min() < -MOMENT_TOL:
            raise DroError("Sigma - mu mu' não é semidefinida")
        if not is_bounded(self.support):
            raise DroError("suporte ilimitado")

    @property
    def N1(self) -> int:
        return self.c.size

    @property
    def N2(self) -> int:
        return self.D.shape[0]

    @property
    def K(self) -> int:
        return self.support.K

    @property
    def L(self) -> int:
        return len(self.rows)

    @property
    def has_recourse_cost(self) -> bool:
        return bool(np.any(self.D) or np.any(self.d))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "c": self.c.tolist(),
            "D": self.D.tolist(),
            "d": self.d.tolist(),
            "rows": [r.to_dict() for r in self.rows],
            "support": self.support.to_dict(),
            "mu": self.mu.tolist(),
            "Sigma": self.Sigma.tolist(),
            "X_A": None if self.X_A is None else self.X_A.tolist(),
            "X_b": None if self.X_b is None else self.X_b.tolist(),
            "meta": dict(self.meta),
        }


# ======================================================================
# POLÍTICA
# ======================================================================
@dataclass
class PldPolicy:
    mode: str
    x: np.ndarray
    pieces: list[tuple[np.ndarray, np.ndarray]]
    partition: PartitionFamily
    ellipsoids: list[Ellipsoid]
    objective: float
    multipliers: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def J(self) -> int:
        return len(self.pieces)

    def rule(self, xi) -> np.ndarray:
        """y(xi) pela primeira célula que contém xi."""
        xi = np.asarray(xi, dtype=float).reshape(-1)
        cells = self.partition.locate(xi, COVER_TOL)
        if not cells:
            raise DroError("ponto fora do suporte")
        Y, y = self.pieces[cells[0]]
        return Y @ xi + y

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "objective": self.objective,
            "x": self.x.tolist(),
            "pieces": [{"Y": Y.tolist(), "y": y.tolist()} for Y, y in self.pieces],
            "ellipsoids": [E.to_dict() for E in self.ellipsoids],
            "partition": self.partition.to_dict(),
            "info": dict(self.info),
        }


# ======================================================================
# PARTIÇÕES
# ======================================================================
def sample_seeds(support: Polytope, J: int, rng: np.random.Generator) -> np.ndarray:
    return support.sample(J, rng)


def _check_cover(cell: Polytope, E: Ellipsoid, j: int) -> None:
    if cell.K > VERTEX_LIMIT and "vertices" not in cell.__dict__:
        return
    if not E.contains(cell.vertices, COVER_TOL):
        worst = float(E.level(cell.vertices).max())
        raise DroError(f"elipsoide {j} não cobre a célula (nível máximo {worst:.6g})")


def build_partitions(support: Polytope, seeds: Sequence, workers: int = 1, settings: lp.SolverSettings | None = None) -> tuple[PartitionFamily, list[Ellipsoid]]:
    """Células de Voronoi e um MVE copositivo por célula (ajustes independentes, em paralelo)."""
    parts = voronoi_partition(support, seeds)
    started = time.perf_counter()
    ellipsoids = parallel_map(lambda cell: solve_polytope_mve(cell, settings)[0], parts.cells, workers)
    for j, (cell, E) in enumerate(zip(parts.cells, ellipsoids)):
        _check_cover(cell, E, j)
    logger.info("partição com %s células ajustada em %.2fs", parts.J, time.perf_counter() - started)
    return parts, ellipsoids


def single_cell(inst: DroInstance, settings: lp.SolverSettings | None = None) -> tuple[PartitionFamily, list[Ellipsoid]]:
    """J = 1: o próprio suporte, com inst.ellipsoid ou o MVE copositivo do suporte."""
    center, _ = chebyshev_center(inst.support)
    parts = PartitionFamily(parent=inst.support, seeds=center[None, :], cells=(inst.support,))
    E = inst.ellipsoid if inst.ellipsoid is not None else solve_polytope_mve(inst.support, settings)[0]
    _check_cover(inst.support, E, 0)
    return parts, [E]


# ======================================================================
# SDP DA REGRA LINEAR POR PARTES
# ======================================================================
def ellipsoid_matrix(E: Ellipsoid) -> np.ndarray:
    """[[A'A, A'b], [b'A, b'b - 1]]: forma quadrática <= 0 dentro de E."""
    A, b = E.A, E.b
    return np.block([[A.T @ A, (A.T @ b)[:, None]], [(b @ A)[None, :], np.array([[b @ b - 1.0]])]])


def _polyhedral_term(S: np.ndarray, t: np.ndarray, rho: lp.Affine) -> lp.Affine:
    """[[0, S'rho/2], [rho'S/2, -t'rho]]: forma quadrática <= 0 dentro da célula."""
    half = (S.T @ rho) * 0.5
    return lp.bmat([[None, half], [half.T, -(t[None, :] @ rho)]])


def _quadratic_lmi(Q: lp.Affine, col: lp.Affine, corner: lp.Affine) -> lp.Affine:
    return lp.bmat([[Q, col], [col.T, corner]])


def _check_inputs(inst: DroInstance, parts: PartitionFamily, ellipsoids: Sequence[Ellipsoid]) -> None:
    if parts.J != len(ellipsoids) or parts.J == 0:
        raise DroError(f"{parts.J} células e {len(ellipsoids)} elipsoides")
    if parts.parent.K != inst.K:
        raise DroError(f"partição em K={parts.parent.K}, instância em K={inst.K}")
    for j, (cell, E) in enumerate(zip(parts.cells, ellipsoids)):
        if E.K != inst.K:
            raise DroError(f"elipsoide {j} em K={E.K}")
        _check_cover(cell, E, j)


def solve_pld(
    inst: DroInstance,
    parts: PartitionFamily,
    ellipsoids: Sequence[Ellipsoid],
    settings: lp.SolverSettings | None = None,
    mode: str = "pwl",
) -> PldPolicy:
    """
    Monta e resolve a SDP da regra linear por partes. Para cada célula j:
        [[Gamma, beta/2], [., alpha]] - (custo de recurso) + P_j(gamma_j) + delta_j J_j >= 0
    e para cada linha l:
        (forma de (W xi + w)'(Y_j xi + y_j)) - M_l(x) + P_j(rho_jl) + lam_jl J_j >= 0.
    Objetivo c'x + alpha + beta'mu + <Gamma, Sigma>.
    """
    if mode not in MODES:
        raise DroError(f"modo desconhecido: {mode}")
    _check_inputs(inst, parts, ellipsoids)
    K, N2 = inst.K, inst.N2

    p = lp.new_problem()
    x = p.add_vector_variable("x", inst.N1)
    if inst.X_A is not None and inst.X_A.size:
        p.add_linear_constraint(inst.X_A @ x, "<=", inst.X_b.reshape(-1, 1), name="primeiro_estagio")
    cost = inst.c[None, :] @ x

    if inst.has_recourse_cost:
        Gamma = p.add_matrix_variable("Gamma", K)
        p.add_psd_constraint(Gamma, "Gamma")
        beta = p.add_vector_variable("beta", K)
        alpha = p.add_scalar_variable("alpha")
        cost = cost + alpha + inst.mu[None, :] @ beta + Gamma.inner(inst.Sigma)

    rules = []
    for j, (cell, E) in enumerate(zip(parts.cells, ellipsoids)):
        S, t = cell.S, cell.t
        Jm = ellipsoid_matrix(E)
        if inst.fixed_rule is not None:
            Y, y = lp.as_affine(inst.fixed_rule[0]), lp.as_affine(inst.fixed_rule[1])
        elif mode == "pws":
            Y, y = lp.as_affine(np.zeros((N2, K))), p.add_vector_variable(f"y{j}", N2)
        else:
            Y, y = p.add_matrix_variable(f"Y{j}", N2, symmetric=False, cols=K), p.add_vector_variable(f"y{j}", N2)
        rules.append((Y, y))

        if inst.has_recourse_cost:
            gamma = p.add_vector_variable(f"gamma{j}", cell.J, nonneg=True)
            delta = p.add_scalar_variable(f"delta{j}", nonneg=True)
            DY = inst.D.T @ Y
            lmi = _quadratic_lmi(
                Gamma - (DY + DY.T) * 0.5,
                beta * 0.5 - (inst.D.T @ y + Y.T @ inst.d[:, None]) * 0.5,
                alpha - inst.d[None, :] @ y,
            )
            p.add_psd_constraint(lmi + _polyhedral_term(S, t, gamma) + delta * Jm, f"objetivo{j}")

        for l, row in enumerate(inst.rows):
            rho = p.add_vector_variable(f"rho{j}_{l}", cell.J, nonneg=True)
            lam = p.add_scalar_variable(f"lam{j}_{l}", nonneg=True)
            WY = row.W.T @ Y
            Tcol = row.Tx @ x + row.T0[:, None]
            lmi = _quadratic_lmi(
                (WY + WY.T) * 0.5,
                (row.W.T @ y + Y.T @ row.w[:, None]) * 0.5 - Tcol * 0.5,
                row.w[None, :] @ y - row.hx[None, :] @ x - row.h0,
            )
            p.add_psd_constraint(lmi + _polyhedral_term(S, t, rho) + lam * Jm, f"recurso{j}_{l}")

    p.set_objective(linear=cost)
    started = time.perf_counter()
    sol = lp.solve(p, settings)
    wall = time.perf_counter() - started
    if sol.status == lp.INFEASIBLE:
        raise RestrictionInfeasibleError(f"restrição {mode} inviável com J={parts.J}")
    sol.raise_for_status()

    xv = np.atleast_1d(np.asarray(sol["x"], dtype=float))
    pieces = [(np.asarray(sol.value(Y), dtype=float).reshape(N2, K), np.asarray(sol.value(y), dtype=float).reshape(N2)) for Y, y in rules]
    objective = float(inst.c @ xv)
    multipliers: dict = {
        "lam": [[float(sol[f"lam{j}_{l}"]) for l in range(inst.L)] for j in range(parts.J)],
        "rho": [[np.asarray(sol[f"rho{j}_{l}"]).tolist() for l in range(inst.L)] for j in range(parts.J)],
    }
    if inst.has_recourse_cost:
        G, bt, al = np.asarray(sol["Gamma"]), np.asarray(sol["beta"]).reshape(K), float(sol["alpha"])
        objective += al + float(bt @ inst.mu) + float(np.sum(G * inst.Sigma))
        multipliers.update(
            Gamma=G.tolist(),
            beta=bt.tolist(),
            alpha=al,
            gamma=[np.asarray(sol[f"gamma{j}"]).tolist() for j in range(parts.J)],
            delta=[float(sol[f"delta{j}"]) for j in range(parts.J)],
        )
    logger.info("pld %s: J=%s, objetivo %.8g, %.2fs", mode, parts.J, objective, wall)
    return PldPolicy(
        mode=mode,
        x=xv,
        pieces=pieces,
        partition=parts,
        ellipsoids=list(ellipsoids),
        objective=objective,
        multipliers=multipliers,
        info={"status": sol.status, "wall_time": wall, "newton": sol.info.get("newton")},
    )


def solve_ablation(
    inst: DroInstance,
    parts: PartitionFamily,
    ellipsoids: Sequence[Ellipsoid],
    mode: str,
    settings: lp.SolverSettings | None = None,
) -> PldPolicy:
    """pws: Y_j = 0; ldr: J = 1 com o elipsoide do suporte; pwl2: raios dobrados, mesmos centros."""
    if mode == "pws":
        return solve_pld(inst, parts, ellipsoids, settings, mode="pws")
    if mode == "ldr":
        one, E1 = single_cell(inst, settings)
        return solve_pld(inst, one, E1, settings, mode="ldr")
    if mode == "pwl2":
        doubled = [Ellipsoid(E.A * 0.5, E.b * 0.5) for E in ellipsoids]
        return solve_pld(inst, parts, doubled, settings, mode="pwl2")
    if mode == "pwl":
        return solve_pld(inst, parts, ellipsoids, settings)
    raise DroError(f"ablação desconhecida: {mode}")


def check_policy(
    inst: DroInstance,
    policy: PldPolicy,
    parts: PartitionFamily | None = None,
    samples: int = 1000,
    rng: np.random.Generator | None = None,
) -> float:
    """Maior violação (>= 0) das restrições de recurso em pontos amostrados de cada célula."""
    parts = parts or policy.partition
    rng = rng or make_rng(0)
    worst = 0.0
    if inst.X_A is not None and inst.X_A.size:
        worst = max(worst, float(np.max(inst.X_A @ policy.x - inst.X_b, initial=0.0)))
    for j, cell in enumerate(parts.cells):
        Xi = cell.sample(samples, rng)
        Y, y = policy.pieces[j]
        for row in inst.rows:
            worst = max(worst, float(np.max(-row.slack(policy.x, Y, y, Xi), initial=0.0)))
    return worst


def relative_gap(value: float, reference: float) -> float:
    return (value - reference) / max(abs(reference), 1e-12)


# ======================================================================
# EXEMPLOS COM VALOR CONHECIDO
# ======================================================================
def example2_instance(K: int = 2, r: float = 1.0) -> DroInstance:
    """
    min tau  s.a.  xi'y(xi) <= tau  em Xi = [-1/sqrt(K), 1/sqrt(K)]^K (dentro da bola unitária),
    com y(xi) = xi fixo e o elipsoide {||xi||^2 <= r}. Valor ótimo da restrição: r.
    """
    if r < 1.0:
        raise DroError("r < 1 não cobre o suporte")
    a = 1.0 / np.sqrt(K)
    row = RecourseRow(W=-np.eye(K), w=np.zeros(K), T0=np.zeros(K), Tx=np.zeros((K, 1)), h0=0.0, hx=[-1.0])
    return DroInstance(
        c=[1.0],
        D=np.zeros((K, K)),
        d=np.zeros(K),
        rows=[row],
        support=box(-a * np.ones(K), a * np.ones(K)),
        mu=np.zeros(K),
        Sigma=np.zeros((K, K)),
        fixed_rule=(np.eye(K), np.zeros(K)),
        ellipsoid=Ellipsoid(np.eye(K) / np.sqrt(r), np.zeros(K)),
        name=f"example2(K={K}, r={r:g})",
        meta={"K": K, "r": r},
    )


def z_example2(r: float) -> float:
    return float(r)


def example3_instance(K: int = 3, s: float = 0.0) -> DroInstance:
    """
    min tau  s.a.  1 <= (xi + e)'y(xi) <= tau  no cubo unitário, com o elipsoide
    {||xi - e/2||^2 <= K(1 + s)/4} (s = 0 é a bola circunscrita).
    """
    if s < 0.0:
        raise DroError("inflação s precisa ser >= 0")
    e = np.ones(K)
    lower = RecourseRow(W=np.eye(K), w=e, T0=np.zeros(K), Tx=np.zeros((K, 1)), h0=1.0)
    upper = RecourseRow(W=-np.eye(K), w=-e, T0=np.zeros(K), Tx=np.zeros((K, 1)), h0=0.0, hx=[-1.0])
    mu = 0.5 * e
    return DroInstance(
        c=[1.0],
        D=np.zeros((K, K)),
        d=np.zeros(K),
        rows=[lower, upper],
        support=unit_box(K),
        mu=mu,
        Sigma=np.outer(mu, mu),
        ellipsoid=Ellipsoid.ball(mu, np.sqrt(K * (1.0 + s) / 4.0)),
        name=f"example3(K={K}, s={s:g})",
        meta={"K": K, "s": s},
    )


def z_example3(s: float) -> float:
    """Valor da restrição com J = 1 em K = 3."""
    if s <= 2.0:
        return 9.0 / (8.0 - s)
    if s <= 4.0:
        return 1.0 + s / 4.0
    return 2.0


# ======================================================================
# ESTOQUE COM CVaR
# ======================================================================
def random_correlation(n: int, rng: np.random.Generator) -> np.ndarray:
    """G G' normalizada para diagonal unitária."""
    G = rng.standard_normal((n, n))
    C = G @ G.T
    scale = 1.0 / np.sqrt(np.diag(C))
    C = C * np.outer(scale, scale)
    return 0.5 * (C + C.T)


def generate_inventory_instance(
    N: int,
    seed: int = 0,
    holding_cost: float | None = None,
    budget: float = INVENTORY_BUDGET,
    eps: float = INVENTORY_EPS,
) -> DroInstance:
    """
    Estoque com N produtos e custo de falta aleatório, min kappa + (1/eps) sup E[tau] com
        tau >= 0, y1 >= 0, y2 >= 0, tau >= g'y1 + s'y2 - kappa, y1 >= x - xi, y2 >= xi - x,
    x >= 0 e e'x <= budget. Incerteza xi~ = [demanda xi; custo de falta s] em [0,10]^N x [8,12]^N.
    Variáveis: primeiro estágio [kappa; x]; recurso [tau; y1; y2].
    """
    if N < 1:
        raise DroError("N precisa ser >= 1")
    if N >= FULL_SCALE_N:
        logger.warning("instância de estoque em escala cheia (N=%s): a SDP fica grande e lenta", N)
    g = float(experiment_setting("INVENTORY_HOLDING_COST") if holding_cost is None else holding_cost) * np.ones(N)
    K, N1, N2 = 2 * N, N + 1, 2 * N + 1
    rng = make_rng(seed, STREAM_INSTANCE)

    def unit(n: int, i: int) -> np.ndarray:
        v = np.zeros(n)
        v[i] = 1.0
        return v

    zero_T = (np.zeros(K), np.zeros((K, N1)))
    rows = [RecourseRow(np.zeros((N2, K)), unit(N2, 0), *zero_T)]
    rows += [RecourseRow(np.zeros((N2, K)), unit(N2, 1 + i), *zero_T) for i in range(N)]
    rows += [RecourseRow(np.zeros((N2, K)), unit(N2, 1 + N + i), *zero_T) for i in range(N)]
    W = np.zeros((N2, K))
    W[1 + N :, N:] = -np.eye(N)
    rows.append(RecourseRow(W, np.concatenate([[1.0], -g, np.zeros(N)]), *zero_T, hx=-unit(N1, 0)))
    rows += [RecourseRow(np.zeros((N2, K)), unit(N2, 1 + i), T0=-unit(K, i), Tx=np.zeros((K, N1)), hx=unit(N1, 1 + i)) for i in range(N)]
    rows += [RecourseRow(np.zeros((N2, K)), unit(N2, 1 + N + i), T0=unit(K, i), Tx=np.zeros((K, N1)), hx=-unit(N1, 1 + i)) for i in range(N)]

    mu = np.concatenate([rng.uniform(0.0, 2.0, N), 10.0 * np.ones(N)])
    sigma = np.concatenate([mu[:N] / 4.0, 0.5 * np.ones(N)])
    C = random_correlation(K, make_rng(seed, STREAM_CORRELATION))
    Sigma = (sigma[:, None] * C * sigma[None, :]) + np.outer(mu, mu)

    X_A = np.vstack([np.hstack([np.zeros((N, 1)), -np.eye(N)]), np.concatenate([[0.0], np.ones(N)])[None, :]])
    X_b = np.concatenate([np.zeros(N), [budget]])
    return DroInstance(
        c=unit(N1, 0),
        D=np.zeros((N2, K)),
        d=unit(N2, 0) / eps,
        rows=rows,
        support=box(np.concatenate([np.zeros(N), 8.0 * np.ones(N)]), np.concatenate([10.0 * np.ones(N), 12.0 * np.ones(N)])),
        mu=mu,
        Sigma=0.5 * (Sigma + Sigma.T),
        X_A=X_A,
        X_b=X_b,
        name=f"inventory(N={N}, seed={seed})",
        meta={"N": N, "seed": seed, "budget": budget, "eps": eps, "holding_cost": float(g[0])},
    )


def inventory_study(N: int, J: int, seed: int, workers: int = 1, settings: lp.SolverSettings | None = None) -> dict:
    """Uma instância: pwl e as três ablações sobre a mesma partição, com os gaps relativos ao pwl."""
    if J >= FULL_SCALE_J and N >= FULL_SCALE_N:
        logger.warning("estudo de estoque em escala cheia (N=%s, J=%s)", N, J)
    inst = generate_inventory_instance(N, seed)
    seeds = sample_seeds(inst.support, J, make_rng(seed, STREAM_SEEDS))
    parts, ellipsoids = build_partitions(inst.support, seeds, workers, settings)
    pwl = solve_pld(inst, parts, ellipsoids, settings)
    out = {"seed": seed, "N": N, "J": J, "pwl": pwl.objective}
    for mode in ("pws", "ldr", "pwl2"):
        out[mode] = solve_ablation(inst, parts, ellipsoids, mode, settings).objective
        out[f"gap_{mode}"] = relative_gap(out[mode], pwl.objective)
    return out
