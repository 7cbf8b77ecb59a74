# elipsoides/instances.py
"""
Famílias de instâncias com nome: simplex, quadrado, caixa, hipercubo chanfrado
(com os certificados em forma fechada), o gerador de politopos aleatórios e
os conjuntos com linhas quadráticas usados nos testes.
"""
from __future__ import annotations

import numpy as np

from .geometry import Ellipsoid, GeometryError, Polytope, QuadSet, unbounded_space
from .mve_copositive import Certificate


def simplex(K: int) -> Polytope:
    """{x >= 0, e'x <= 1}."""
    S = np.vstack([-np.eye(K), np.ones((1, K))])
    t = np.append(np.zeros(K), 1.0)
    V = np.vstack([np.zeros(K), np.eye(K)])
    return Polytope(S, t, known_vertices=V)


def box(lo, hi) -> Polytope:
    lo = np.asarray(lo, dtype=float).reshape(-1)
    hi = np.asarray(hi, dtype=float).reshape(-1)
    if lo.shape != hi.shape or np.any(hi <= lo):
        raise GeometryError("caixa inválida")
    K = lo.size
    S = np.vstack([np.eye(K), -np.eye(K)])
    t = np.concatenate([hi, -lo])
    return Polytope(S, t)


def unit_box(K: int) -> Polytope:
    return box(np.zeros(K), np.ones(K))


def unit_square() -> Polytope:
    return unit_box(2)


def chipped_hypercube(K: int) -> Polytope:
    """Hipercubo [0,1]^K cortado por e'x <= sqrt(K)."""
    S = np.vstack([np.eye(K), -np.eye(K), np.ones((1, K))])
    t = np.concatenate([np.ones(K), np.zeros(K), [np.sqrt(K)]])
    return Polytope(S, t)


# ======================================================================
# HIPERCUBO CHANFRADO: FORMAS FECHADAS
# ======================================================================
def chipped_cop_constants(K: int) -> tuple[float, float, float, float, float]:
    k1 = np.sqrt((K**2 - 1) / ((np.sqrt(K) - 1) * K**2))
    k2 = (1.0 + 1.0 / K - k1) / K
    k3 = -1.0 / np.sqrt(K)
    k4 = k1**2 / 2.0
    k5 = k2 * (k1 + K * k2 / 2.0)
    return float(k1), float(k2), float(k3), float(k4), float(k5)


def chipped_cop_closed_form(K: int):
    """
    Ponto viável do problema copositivo no hipercubo chanfrado:
    A = k1 I + k2 ee', b = k3 e e N com blocos k4 I (entre x <= 1 e -x <= 0) e k5 e
    (entre -x <= 0 e a linha do chanfro). Devolve (Ellipsoid, Certificate).
    """
    k1, k2, k3, k4, k5 = chipped_cop_constants(K)
    e = np.ones(K)
    A = k1 * np.eye(K) + k2 * np.outer(e, e)
    b = k3 * e
    J = 2 * K + 1
    N = np.zeros((J, J))
    N[:K, K : 2 * K] = k4 * np.eye(K)
    N[K : 2 * K, :K] = k4 * np.eye(K)
    N[K : 2 * K, 2 * K] = k5
    N[2 * K, K : 2 * K] = k5
    Ab = np.hstack([A, b[:, None]])
    H = Ab.T @ Ab
    cert = Certificate(N=N, F=H[:K, :K], g=H[:K, K], h=float(H[K, K]))
    return Ellipsoid(A, b), cert


def chipped_cop_radius_bound(K: int) -> float:
    """Raio do ponto em forma fechada: ((1 + 1/K) k1^(K-1))^(-1/K)."""
    k1 = chipped_cop_constants(K)[0]
    return float(((1.0 + 1.0 / K) * k1 ** (K - 1)) ** (-1.0 / K))


def chipped_smvie_constants(K: int) -> tuple[float, ...]:
    r = np.sqrt(K + 1.0)
    m1 = K / r
    m2 = 1.0 / (K + 1.0) - 1.0 / r
    m3 = np.sqrt(K) / (K + 1.0)
    m4 = r / K
    m5 = (1.0 - r) / K**2
    m6 = -1.0 / K
    return tuple(float(v) for v in (m1, m2, m3, m4, m5, m6))


def chipped_smvie_closed_form(K: int):
    """
    Ótimo do SMVIE no hipercubo chanfrado: elipsoide externo {B u + d : ||u|| <= 1}
    (B já multiplicado por K) e o dual (Lam, rho).
    Devolve (B, d, Lam, rho).
    """
    m1, m2, m3, m4, m5, m6 = chipped_smvie_constants(K)
    e = np.ones(K)
    B = m1 * np.eye(K) + m2 * np.outer(e, e)
    d = m3 * e
    rho = np.concatenate([np.zeros(K), np.ones(K), [1.0]]) / np.sqrt(K)
    Lam = np.vstack([np.zeros((K, K)), m4 * np.eye(K) + m5 * np.outer(e, e), m6 * e[None, :]])
    return B, d, Lam, rho


def chipped_smvie_det(K: int) -> float:
    return float(K**K / (K + 1.0) ** ((K + 1) / 2.0))


def chipped_smvie_radius(K: int) -> float:
    """R_smvie = det(B)^(1/K); cresce como sqrt(K)."""
    return float(chipped_smvie_det(K) ** (1.0 / K))


# ======================================================================
# POLITOPOS ALEATÓRIOS
# ======================================================================
def random_polytope(K: int, M: int, rng: np.random.Generator) -> Polytope:
    """
    Caixa [0,1]^K mais M cortes aleatórios passando perto do centro c = e/2:
    s_j uniforme na esfera, r_j ~ U[-||s_j||_1/2, ||s_j||_1/2] e o corte
    s_j'(x - c) <= r_j (r_j > 0) ou s_j'(x - c) >= r_j (caso contrário).
    """
    c = np.full(K, 0.5)
    rows = [np.eye(K), -np.eye(K)]
    rhs = [np.ones(K), np.zeros(K)]
    for _ in range(M):
        s = rng.standard_normal(K)
        s /= np.linalg.norm(s)
        half = 0.5 * np.abs(s).sum()
        r = rng.uniform(-half, half)
        if r > 0:
            rows.append(s[None, :])
            rhs.append([r + s @ c])
        else:
            rows.append(-s[None, :])
            rhs.append([-r - s @ c])
    return Polytope(np.vstack(rows), np.concatenate(rhs))


def random_simplex(K: int, rng: np.random.Generator) -> Polytope:
    """Imagem afim aleatória (bem condicionada) do simplex padrão."""
    while True:
        T = rng.standard_normal((K, K))
        if np.linalg.cond(T) < 1e3:
            break
    return simplex(K).image(T, rng.standard_normal(K))


# ======================================================================
# CONJUNTOS COM LINHAS QUADRÁTICAS
# ======================================================================
def ball_row(center, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """(Q, q) com ||Q x + q||^2 <= 1 <=> ||x - center|| <= radius."""
    c = np.asarray(center, dtype=float).reshape(-1)
    Q = np.eye(c.size) / float(radius)
    return Q, -Q @ c


def ellipsoid_row(E: Ellipsoid) -> tuple[np.ndarray, np.ndarray]:
    return np.array(E.A), np.array(E.b)


def ball_set(center, radius: float) -> QuadSet:
    c = np.asarray(center, dtype=float).reshape(-1)
    return QuadSet(unbounded_space(c.size), (ball_row(c, radius),), witness=c)


def square_ball_set() -> QuadSet:
    """Quadrado unitário com a bola unitária centrada na origem."""
    return QuadSet(unit_square(), (ball_row(np.zeros(2), 1.0),))


def two_balls_set() -> QuadSet:
    """Interseção das bolas unitárias centradas em 0 e em (1, 0)."""
    return QuadSet(
        unbounded_space(2),
        (ball_row(np.zeros(2), 1.0), ball_row([1.0, 0.0], 1.0)),
        witness=np.array([0.5, 0.0]),
    )


def with_redundant_ellipsoid(P: Polytope, E: Ellipsoid) -> QuadSet:
    """P com a linha ||A x + b||^2 <= 1 redundante (E deve conter P)."""
    if not E.contains(P.vertices, 1e-6):
        raise GeometryError("elipsoide não contém o politopo; linha não seria redundante")
    return QuadSet(P, (ellipsoid_row(E),))


def square_with_circumscribed_ball() -> QuadSet:
    return with_redundant_ellipsoid(unit_square(), Ellipsoid.ball([0.5, 0.5], np.sqrt(0.5)))
