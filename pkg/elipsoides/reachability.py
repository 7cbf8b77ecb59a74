# elipsoides/reachability.py
"""
Aproximação externa por elipsoides do conjunto alcançável de
    x(t+1) = W1 x(t) + W2 u(t),   u(t) em U (politopo),   x(0) = 0.

Cada passo cobre W1 E_{t-1} + W2 U com um MVE sobre a variável levantada
zeta = [z; u]: as linhas de U entram no multiplicador N e E_{t-1} entra como
uma linha quadrática sobre z (com os termos cruzados SOC-RLT). O tamanho de
cada passo não cresce com t. E_1 é o MVE exato de W2 U, calculado pelos vértices.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import logdet_sdp as lp
from .geometry import (
    DEDUP_TOL,
    Ellipsoid,
    Polytope,
    QuadSet,
    candidate_vertices,
    is_bounded,
)
from .mve_baselines import CG_EPS, mve_of_points
from .mve_copositive import Certificate, MveError, solve_lifted_mve
from .parallel import make_rng

logger = logging.getLogger(__name__)

SCALE_CAP = 60
MEMBERSHIP_TOL = 1e-6
CONTAIN_TOL = 1e-6

EXAMPLE_W1 = np.array([[0.9202, -0.0396], [0.0777, 0.9800]])
EXAMPLE_L1 = 1.4


class ReachabilityError(Exception):
    """Sistema inválido ou passo de propagação impossível."""


class ScaleCapError(ReachabilityError):
    """Problema exato grande demais para a escala de mesa."""


# ======================================================================
# SISTEMA
# ======================================================================
@dataclass
class LinearSystem:
    W1: np.ndarray
    W2: np.ndarray
    U: Polytope
    control_point: np.ndarray | None = field(default=None, init=False)

    def __post_init__(self):
        self.W1 = np.asarray(self.W1, dtype=float)
        self.W2 = np.asarray(self.W2, dtype=float).reshape(self.W1.shape[0], -1)
        K = self.W1.shape[0]
        if self.W1.shape != (K, K):
            raise ReachabilityError(f"W1 precisa ser quadrada, veio {self.W1.shape}")
        if self.W2.shape[1] != self.U.K:
            raise ReachabilityError(f"W2 {self.W2.shape} incompatível com U em R^{self.U.K}")
        if not is_bounded(self.U):
            raise ReachabilityError("conjunto de controle ilimitado")
        V = candidate_vertices(self.U)
        if len(V) == 0:
            raise ReachabilityError("conjunto de controle vazio")
        if np.ptp(V, axis=0).max() <= DEDUP_TOL:
            self.control_point = V.mean(axis=0)
        else:
            self.U.vertices  # guarda os vértices (levanta se U não tiver interior)

    @property
    def K(self) -> int:
        return self.W1.shape[0]

    @property
    def Ju(self) -> int:
        return self.U.K

    @property
    def degenerate(self) -> bool:
        return self.control_point is not None

    @property
    def control_vertices(self) -> np.ndarray:
        if self.degenerate:
            return self.control_point[None, :]
        return self.U.vertices

    def horizon_maps(self, T: int) -> list[np.ndarray]:
        """W1^(T-1-t) W2 para t = 0..T-1."""
        maps = []
        M = self.W2.copy()
        for _ in range(T):
            maps.append(M)
            M = self.W1 @ M
        return maps[::-1]

    def to_dict(self) -> dict:
        return {"W1": self.W1.tolist(), "W2": self.W2.tolist(), "U": self.U.to_dict()}


def example_system() -> LinearSystem:
    """Sistema 2x2 com U = {-e <= u <= e, ||u||_1 <= 1.4} e W2 = I."""
    signs = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
    S = np.vstack([np.eye(2), -np.eye(2), signs])
    t = np.concatenate([np.ones(4), EXAMPLE_L1 * np.ones(4)])
    return LinearSystem(EXAMPLE_W1.copy(), np.eye(2), Polytope(S, t))


# ======================================================================
# PROPAGAÇÃO
# ======================================================================
def _symmetric_form(M: np.ndarray, c: np.ndarray) -> Ellipsoid:
    """{x : ||M x + c|| <= 1} com M qualquer inversível, reescrito com A simétrica (decomposição polar)."""
    w, V = np.linalg.eigh(M.T @ M)
    if w.min() <= 0.0:
        raise ReachabilityError("mapa singular")
    P = (V * np.sqrt(w)) @ V.T
    R = M @ np.linalg.inv(P)
    return Ellipsoid(0.5 * (P + P.T), R.T @ c)


def lifted_set(sys: LinearSystem, E_prev: Ellipsoid) -> tuple[QuadSet, np.ndarray]:
    """Conjunto em zeta = [z; u] e o mapa W = [W1 W2]."""
    K, Ju = sys.K, sys.Ju
    S = np.hstack([np.zeros((sys.U.J, K)), sys.U.S])
    base = Polytope(S, sys.U.t)
    Q = np.hstack([np.asarray(E_prev.A), np.zeros((K, Ju))])
    witness = np.concatenate([E_prev.center, sys.U.interior_point])
    return QuadSet(base, ((Q, np.asarray(E_prev.b)),), witness=witness), np.hstack([sys.W1, sys.W2])


def propagate_with_certificate(
    sys: LinearSystem,
    E_prev: Ellipsoid,
    settings: lp.SolverSettings | None = None,
    include_rlt: bool = True,
) -> tuple[Ellipsoid, QuadSet | None, Certificate | None]:
    if E_prev.K != sys.K:
        raise ReachabilityError(f"elipsoide em K={E_prev.K}, sistema em K={sys.K}")
    if sys.degenerate:
        try:
            W1inv = np.linalg.inv(sys.W1)
        except np.linalg.LinAlgError as e:
            raise ReachabilityError("U é um ponto e W1 é singular") from e
        M = np.asarray(E_prev.A) @ W1inv
        return _symmetric_form(M, np.asarray(E_prev.b) - M @ sys.W2 @ sys.control_point), None, None
    X, W = lifted_set(sys, E_prev)
    E, certs, _ = solve_lifted_mve([(X, W)], include_rlt=include_rlt, settings=settings, label="reach")
    return E, X, certs[0]


def propagate(sys: LinearSystem, E_prev: Ellipsoid, settings: lp.SolverSettings | None = None) -> Ellipsoid:
    return propagate_with_certificate(sys, E_prev, settings)[0]


def first_step(sys: LinearSystem) -> Ellipsoid:
    """E_1 = MVE exato de W2 U (x0 = 0), pelos vértices de U levados por W2."""
    if sys.degenerate:
        raise ReachabilityError("U é um ponto: W2 U não tem elipsoide de volume positivo")
    try:
        return mve_of_points(sys.control_vertices @ sys.W2.T, eps=CG_EPS)
    except MveError as e:
        raise ReachabilityError(f"W2 U sem volume positivo: {e}") from e


def reach_sequence(sys: LinearSystem, T: int, settings: lp.SolverSettings | None = None) -> list[Ellipsoid]:
    """E_1..E_T; T resoluções de tamanho fixo."""
    if T < 1:
        raise ReachabilityError("horizonte T precisa ser >= 1")
    started = time.perf_counter()
    out = [first_step(sys)]
    for t in range(2, T + 1):
        out.append(propagate(sys, out[-1], settings))
        logger.debug("alcançável t=%s: volume %.6g", t, out[-1].volume)
    logger.info("sequência alcançável T=%s em %.2fs (volume final %.6g)", T, time.perf_counter() - started, out[-1].volume)
    return out


def run_example(T: int, settings: lp.SolverSettings | None = None) -> list[Ellipsoid]:
    return reach_sequence(example_system(), T, settings)


# ======================================================================
# CONJUNTO ALCANÇÁVEL EXATO (pontos, suporte, pertinência)
# ======================================================================
def sample_reachable(sys: LinearSystem, T: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Estados em T com controles sorteados entre os vértices de U."""
    V = sys.control_vertices
    out = np.zeros((count, sys.K))
    for M in sys.horizon_maps(T):
        out += V[rng.integers(0, len(V), size=count)] @ M.T
    return out


def reachable_support(sys: LinearSystem, T: int, direction) -> float:
    d = np.asarray(direction, dtype=float).reshape(sys.K)
    V = sys.control_vertices
    return float(sum(np.max(V @ (M.T @ d)) for M in sys.horizon_maps(T)))


def reachable_boundary(sys: LinearSystem, T: int, count: int = 256) -> np.ndarray:
    """Pontos de suporte numa grade angular de direções (K = 2)."""
    if sys.K != 2:
        raise ReachabilityError("fronteira exata só em K = 2")
    theta = 2.0 * np.pi * np.arange(count) / count
    D = np.column_stack([np.cos(theta), np.sin(theta)])
    V = sys.control_vertices
    pts = np.zeros((count, 2))
    for M in sys.horizon_maps(T):
        mapped = V @ M.T
        pts += mapped[np.argmax(D @ mapped.T, axis=1)]
    return pts


def reach_membership_exact(
    sys: LinearSystem,
    x,
    T: int,
    settings: lp.SolverSettings | None = None,
    tol: float = MEMBERSHIP_TOL,
) -> bool:
    """
    Existe u(0..T-1) em U com sum W1^(T-1-t) W2 u(t) = x?
    Resolve min s s.a. S_U u(t) <= t_U + s e a igualdade; alcançável se s* <= tol.
    """
    x = np.asarray(x, dtype=float).reshape(sys.K)
    if T * sys.Ju > SCALE_CAP:
        raise ScaleCapError(f"T*J = {T * sys.Ju} > {SCALE_CAP}")
    p = lp.new_problem()
    s = p.add_scalar_variable("s")
    total = lp.as_affine(np.zeros((sys.K, 1)))
    for t, M in enumerate(sys.horizon_maps(T)):
        u = p.add_vector_variable(f"u{t}", sys.Ju)
        p.add_linear_constraint(sys.U.S @ u, "<=", s * np.ones((sys.U.J, 1)) + sys.U.t[:, None], name=f"U{t}")
        total = total + M @ u
    p.add_linear_constraint(total, "==", x[:, None], name="estado")
    p.set_objective(linear=s)
    sol = lp.solve(p, settings)
    if sol.status == lp.INFEASIBLE:
        return False
    sol.raise_for_status()
    return float(sol["s"]) <= tol


def containment_worst(
    sys: LinearSystem,
    ellipsoids: list[Ellipsoid],
    count: int,
    rng: np.random.Generator,
) -> float:
    """Maior ||A x + b||^2 sobre estados amostrados, para todo t <= T."""
    worst = 0.0
    for t, E in enumerate(ellipsoids, start=1):
        worst = max(worst, float(E.level(sample_reachable(sys, t, count, rng)).max()))
    return worst


def step_samples(sys: LinearSystem, E_prev: Ellipsoid, count: int = 64) -> np.ndarray:
    """W1 z + W2 v para z na fronteira de E_prev e v vértice de U."""
    Z = E_prev.boundary(count) if sys.K == 2 else E_prev.boundary(count, make_rng(0))
    V = sys.control_vertices
    return (Z @ sys.W1.T)[:, None, :].repeat(len(V), axis=1).reshape(-1, sys.K) + np.tile(V @ sys.W2.T, (len(Z), 1))
