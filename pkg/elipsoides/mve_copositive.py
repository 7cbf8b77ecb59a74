# elipsoides/mve_copositive.py
from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import logdet_sdp as lp
from .geometry import (
    VERTEX_LIMIT,
    DimensionMismatchError,
    Ellipsoid,
    GeometryError,
    Polytope,
    QuadSet,
    UnboundedPolytopeError,
    chebyshev_center,
    is_bounded,
)

logger = logging.getLogger(__name__)

LMI_TOL = 1e-7
SIGN_TOL = 1e-9
CONTAIN_TOL = 1e-6


class MveError(Exception):
    """Erro ao montar ou resolver um problema de elipsoide mínimo."""


class InfeasibleDualError(MveError):
    """(Lambda, rho) não é viável para o dual do SMVIE."""


# ======================================================================
# CERTIFICADO
# ======================================================================
@dataclass
class Certificate:
    """
    Multiplicadores que provam E(A, b) ⊇ W·X.
    Para conjuntos só poliédricos lam/alpha/kappa ficam vazios; lift=None equivale à identidade.
    """

    N: np.ndarray
    F: np.ndarray
    g: np.ndarray
    h: float
    lam: np.ndarray = field(default_factory=lambda: np.zeros(0))
    alpha: list[np.ndarray] = field(default_factory=list)  # por quádrica i: (J, p_i)
    kappa: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))  # (I, J)
    lift: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "N": np.asarray(self.N).tolist(),
            "F": np.asarray(self.F).tolist(),
            "g": np.asarray(self.g).tolist(),
            "h": float(self.h),
            "lam": np.asarray(self.lam).tolist(),
            "alpha": [np.asarray(a).tolist() for a in self.alpha],
            "kappa": np.asarray(self.kappa).tolist(),
            "lift": None if self.lift is None else np.asarray(self.lift).tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Certificate":
        F = np.array(data["F"], dtype=float)
        Kx = F.shape[0]
        N = np.array(data.get("N") or [], dtype=float)
        N = N.reshape(int(round(np.sqrt(N.size))), -1) if N.size else np.zeros((0, 0))
        lam = np.array(data.get("lam") or [], dtype=float).reshape(-1)
        kappa = np.array(data.get("kappa") or [], dtype=float)
        kappa = kappa.reshape(lam.size, -1) if lam.size else np.zeros((0, 0))
        lift = data.get("lift")
        return cls(
            N=N,
            F=F,
            g=np.array(data["g"], dtype=float).reshape(Kx),
            h=float(data["h"]),
            lam=lam,
            alpha=[np.array(a, dtype=float).reshape(N.shape[0], -1) for a in data.get("alpha") or []],
            kappa=kappa,
            lift=None if lift is None else np.array(lift, dtype=float),
        )


@dataclass
class CertificateReport:
    b1_min_eig: float
    b2_min_eig: float
    n_min: float
    soc_min_slack: float
    lam_min: float
    vertex_form_max: float | None
    containment_max: float | None
    tol: float = LMI_TOL

    @property
    def failures(self) -> list[str]:
        out = []
        if self.b1_min_eig < -self.tol:
            out.append("primeira LMI")
        if self.b2_min_eig < -self.tol:
            out.append("segunda LMI")
        if self.n_min < -SIGN_TOL:
            out.append("N negativo")
        if self.soc_min_slack < -SIGN_TOL:
            out.append("cone de segunda ordem")
        if self.lam_min < -SIGN_TOL:
            out.append("lambda negativo")
        if self.vertex_form_max is not None and self.vertex_form_max > self.tol:
            out.append("forma nos vértices")
        if self.containment_max is not None and self.containment_max > 1.0 + CONTAIN_TOL:
            out.append("contenção")
        return out

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failures": self.failures,
            "b1_min_eig": self.b1_min_eig,
            "b2_min_eig": self.b2_min_eig,
            "n_min": self.n_min,
            "soc_min_slack": self.soc_min_slack,
            "lam_min": self.lam_min,
            "vertex_form_max": self.vertex_form_max,
            "containment_max": self.containment_max,
        }


# ======================================================================
# AS DUAS LMIs (servem tanto para o modelo quanto para a verificação)
# ======================================================================
def _rows(X: QuadSet) -> tuple[np.ndarray, np.ndarray]:
    return X.base.S, X.base.t


def quad_matrix(Q: np.ndarray, q: np.ndarray) -> np.ndarray:
    """J_i = [[Q'Q, Q'q], [q'Q, q'q - 1]]."""
    return np.block([[Q.T @ Q, (Q.T @ q)[:, None]], [(q @ Q)[None, :], np.array([[q @ q - 1.0]])]])


def _m_term(Sj, tj, Q, q, alpha, kappa) -> lp.Affine:
    """Termo SOC-RLT: a forma quadrática vale (tau t_j - S_j'x)(tau kappa + alpha'(Q x + tau q))."""
    s = np.asarray(Sj, dtype=float).reshape(-1, 1)
    u = Q.T @ alpha
    c = q.reshape(1, -1) @ alpha + kappa
    top_left = (s @ u.T + u @ s.T) * -0.5
    top_right = (u * float(tj) - c * s) * 0.5
    return lp.bmat([[top_left, top_right], [top_right.T, c * float(tj)]])


def lifted_lmis(X: QuadSet, W: np.ndarray, A, b, F, g, h, N, lam, alpha, kappa) -> tuple[lp.Affine, lp.Affine]:
    """
    B1 = -S~' N S~ + sum lam_i J_i - sum M_ij - [[F, g], [g', h-1]]
    B2 = [[F, g, (A W)'], [g', h, b'], [A W, b, I]]
    Os argumentos podem ser expressões ou constantes.
    """
    S, t = _rows(X)
    K = W.shape[0]
    F, g, h, A, b = (lp.as_affine(v) for v in (F, g, h, A, b))
    B1 = -lp.bmat([[F, g], [g.T, h - 1.0]])
    if S.shape[0]:
        St = np.hstack([-S, t[:, None]])
        B1 = B1 - St.T @ lp.as_affine(N) @ St
    for i, (Q, q) in enumerate(X.quads):
        B1 = B1 + lp.as_affine(lam[i]) * quad_matrix(Q, q)
        if alpha is not None:
            for j in range(S.shape[0]):
                B1 = B1 - _m_term(S[j], t[j], Q, q, lp.as_affine(alpha[i][j]), lp.as_affine(kappa[i][j]))
    AW = A @ W
    B2 = lp.bmat([[F, g, AW.T], [g.T, h, b.T], [AW, b, np.eye(K)]])
    return B1, B2


# ======================================================================
# PONTO INICIAL ESTRITAMENTE VIÁVEL
# ======================================================================
def gordan_multipliers(S: np.ndarray) -> np.ndarray | None:
    """y >= 1 com S'y = 0 (existe se e só se {x : Sx <= t} for limitado nas direções de S)."""
    if S.shape[0] == 0:
        return None
    res = linprog(
        c=np.ones(S.shape[0]),
        A_eq=S.T,
        b_eq=np.zeros(S.shape[1]),
        bounds=[(1.0, None)] * S.shape[0],
        method="highs",
    )
    return res.x if res.status == 0 else None


@dataclass
class _PartStart:
    N: np.ndarray | None
    lam: np.ndarray
    Phi: np.ndarray
    margin: float


def _part_start(X: QuadSet) -> _PartStart:
    S, t = _rows(X)
    Kx = X.K
    J, I = S.shape[0], len(X.quads)
    e_last = np.zeros((Kx + 1, Kx + 1))
    e_last[-1, -1] = 1.0

    Phi = e_last.copy()
    N = None
    budget = 0.5
    y = gordan_multipliers(S)
    if y is not None and y @ t > 0:
        rho = y * (0.5 / (y @ t))
        norms = np.linalg.norm(S, axis=1)
        Lam = -0.9 * rho[:, None] * S / np.where(norms > 0, norms, 1.0)[:, None]
        kap = np.exp(1.0 - rho @ t)
        N = kap**2 * (np.outer(rho, rho) - Lam @ Lam.T)
        St = np.hstack([-S, t[:, None]])
        LS = Lam.T @ St
        Phi = kap**2 * LS.T @ LS + (1.0 - (kap * (rho @ t)) ** 2) * e_last
        budget = 0.5 * (1.0 - (kap * (rho @ t)) ** 2)
    elif J:
        N = np.full((J, J), 1e-6)

    lam = np.full(I, budget / I) if I else np.zeros(0)
    for i, (Q, q) in enumerate(X.quads):
        Phi = Phi + lam[i] * quad_matrix(Q, q)
    margin = float(np.linalg.eigvalsh(Phi).min())
    return _PartStart(N, lam, Phi, margin)


# ======================================================================
# CONSTRUTOR GERAL (conjunto levantado + mapa W)
# ======================================================================
def _check_part(X: QuadSet, W: np.ndarray, K: int):
    if W.shape != (K, X.K):
        raise DimensionMismatchError(f"mapa W {W.shape} não leva R^{X.K} em R^{K}")


def solve_lifted_mve(
    parts: Sequence[tuple[QuadSet, np.ndarray]],
    include_rlt: bool = True,
    settings: lp.SolverSettings | None = None,
    label: str = "cop",
) -> tuple[Ellipsoid, list[Certificate], lp.SdpSolution]:
    """
    Elipsoide E(A, b) em R^K que contém W_k·X_k para todas as partes k,
    com (A, b) compartilhados e um certificado por parte.
    """
    if not parts:
        raise MveError("nenhuma parte informada")
    K = int(np.asarray(parts[0][1]).shape[0])
    parts = [(X, np.asarray(W, dtype=float)) for X, W in parts]
    for X, W in parts:
        _check_part(X, W, K)

    started = time.perf_counter()
    p = lp.new_problem()
    A = p.add_matrix_variable("A", K)
    b = p.add_vector_variable("b", K)

    center = np.mean([W @ X.witness for X, W in parts], axis=0)
    starts = [_part_start(X) for X, _ in parts]
    margins = [max(s.margin, 1e-8) for s in starts]
    eps = min(
        np.sqrt(m / 4.0) / np.linalg.norm(np.hstack([W, -center[:, None]]), 2)
        for m, (_, W) in zip(margins, parts)
    )
    x0: dict = {"A": eps * np.eye(K), "b": -eps * center}

    handles = []
    for k, ((X, W), start, margin) in enumerate(zip(parts, starts, margins)):
        S, t = _rows(X)
        J, I, Kx = S.shape[0], len(X.quads), X.K
        F = p.add_matrix_variable(f"F{k}", Kx)
        g = p.add_vector_variable(f"g{k}", Kx)
        h = p.add_scalar_variable(f"h{k}")
        N = p.add_matrix_variable(f"N{k}", J, nonneg=True) if J else None
        lam = [p.add_scalar_variable(f"lam{k}_{i}", nonneg=True) for i in range(I)]
        alpha = kappa = None
        if include_rlt and I and J:
            alpha = [[p.add_vector_variable(f"alpha{k}_{i}_{j}", X.quads[i][0].shape[0]) for j in range(J)] for i in range(I)]
            kappa = [[p.add_scalar_variable(f"kappa{k}_{i}_{j}") for j in range(J)] for i in range(I)]
            for i in range(I):
                for j in range(J):
                    p.add_soc_constraint(alpha[i][j], kappa[i][j], name=f"soc{k}_{i}_{j}")
        B1, B2 = lifted_lmis(X, W, A, b, F, g, h, N, lam, alpha, kappa)
        p.add_psd_constraint(B1, name=f"B1_{k}")
        p.add_psd_constraint(B2, name=f"B2_{k}")
        handles.append((X, W, J, I))

        # Slater: H = eta I + [A W, b]'[A W, b], kappa pequeno, alpha = 0
        AWb = eps * np.hstack([W, -center[:, None]])
        H = margin / 4.0 * np.eye(Kx + 1) + AWb.T @ AWb
        x0[f"F{k}"] = H[:Kx, :Kx]
        x0[f"g{k}"] = H[:Kx, Kx]
        x0[f"h{k}"] = H[Kx, Kx]
        if N is not None:
            x0[f"N{k}"] = start.N
        for i in range(I):
            x0[f"lam{k}_{i}"] = start.lam[i]
        if alpha is not None:
            for i in range(I):
                for j in range(J):
                    scale = np.linalg.norm(np.append(S[j], t[j]))
                    x0[f"kappa{k}_{i}_{j}"] = margin / (8.0 * I * J * max(scale, 1e-12))

    p.set_objective(logdet=A)
    sol = lp.solve(p, settings=settings, x0=x0)
    sol.raise_for_status()

    E = Ellipsoid(sol["A"], sol["b"])
    certs = []
    for k, (X, W, J, I) in enumerate(handles):
        alpha_vals = []
        kappa_vals = np.zeros((I, J)) if I else np.zeros((0, 0))
        if include_rlt and I and J:
            for i in range(I):
                alpha_vals.append(np.array([sol[f"alpha{k}_{i}_{j}"] for j in range(J)]))
                kappa_vals[i] = [sol[f"kappa{k}_{i}_{j}"] for j in range(J)]
        certs.append(
            Certificate(
                N=sol[f"N{k}"] if J else np.zeros((0, 0)),
                F=sol[f"F{k}"],
                g=sol[f"g{k}"],
                h=sol[f"h{k}"],
                lam=np.array([sol[f"lam{k}_{i}"] for i in range(I)]),
                alpha=alpha_vals,
                kappa=kappa_vals,
                lift=W,
                info={"objective": sol.objective, "status": sol.status, "newton": sol.info.get("newton")},
            )
        )
    logger.info(
        "%s: K=%s partes=%s volume=%.8g (%.2fs, %s Newton)",
        label, K, len(parts), E.volume, time.perf_counter() - started, sol.info.get("newton"),
    )
    return E, certs, sol


# ======================================================================
# CASOS PARTICULARES
# ======================================================================
def _as_quadset(X: Polytope | QuadSet) -> QuadSet:
    if isinstance(X, QuadSet):
        return X
    if X.K <= VERTEX_LIMIT or "vertices" in X.__dict__:
        X.vertices  # levanta para politopo ilimitado ou degenerado
        return QuadSet(X, ())
    if not is_bounded(X):
        raise UnboundedPolytopeError(f"politopo ilimitado (J={X.J}, K={X.K})")
    center, _ = chebyshev_center(X)
    return QuadSet(X, (), witness=center)


def solve_polytope_mve(P: Polytope, settings: lp.SolverSettings | None = None) -> tuple[Ellipsoid, Certificate]:
    X = _as_quadset(P)
    E, certs, _ = solve_lifted_mve([(X, np.eye(P.K))], settings=settings, label="cop")
    return E, certs[0]


def solve_quadset_mve(X: QuadSet, include_rlt: bool = True, settings: lp.SolverSettings | None = None) -> tuple[Ellipsoid, Certificate]:
    E, certs, _ = solve_lifted_mve([(X, np.eye(X.K))], include_rlt=include_rlt, settings=settings, label="cop-quad")
    return E, certs[0]


def minkowski_lift(summands: Sequence[Polytope], maps: Sequence[np.ndarray]) -> tuple[Polytope, np.ndarray]:
    """Politopo produto (S em blocos) e W = [W_1 ... W_L]; vértices = produto cartesiano."""
    if not summands or len(summands) != len(maps):
        raise MveError("informe um mapa para cada parcela")
    maps = [np.asarray(W, dtype=float) for W in maps]
    K = maps[0].shape[0]
    for P, W in zip(summands, maps):
        if W.shape != (K, P.K):
            raise DimensionMismatchError(f"mapa {W.shape} incompatível com parcela K={P.K}")
    S = np.zeros((sum(P.J for P in summands), sum(P.K for P in summands)))
    r = c = 0
    for P in summands:
        S[r : r + P.J, c : c + P.K] = P.S
        r += P.J
        c += P.K
    t = np.concatenate([P.t for P in summands])
    verts = [np.concatenate(combo) for combo in itertools.product(*[P.vertices for P in summands])]
    return Polytope(S, t, known_vertices=np.array(verts)), np.hstack(maps)


def solve_minkowski_mve(summands: Sequence[Polytope], maps: Sequence[np.ndarray], settings: lp.SolverSettings | None = None) -> tuple[Ellipsoid, Certificate]:
    lifted, W = minkowski_lift(summands, maps)
    E, certs, _ = solve_lifted_mve([(QuadSet(lifted, ()), W)], settings=settings, label="cop-minkowski")
    return E, certs[0]


def solve_union_mve(parts: Sequence[Polytope], settings: lp.SolverSettings | None = None) -> tuple[Ellipsoid, list[Certificate]]:
    if not parts:
        raise MveError("união vazia")
    K = parts[0].K
    if any(P.K != K for P in parts):
        raise DimensionMismatchError("partes com dimensões diferentes")
    E, certs, _ = solve_lifted_mve([(_as_quadset(P), np.eye(K)) for P in parts], settings=settings, label="cop-union")
    return E, certs


def solve_projection_mve(P: Polytope, K1: int, settings: lp.SolverSettings | None = None) -> tuple[Ellipsoid, Certificate]:
    if not 1 <= K1 < P.K:
        raise MveError(f"K1={K1} precisa estar em [1, {P.K - 1}]")
    W = np.hstack([np.eye(K1), np.zeros((K1, P.K - K1))])
    E, certs, _ = solve_lifted_mve([(_as_quadset(P), W)], settings=settings, label="cop-projection")
    return E, certs[0]


# ======================================================================
# VERIFICAÇÃO
# ======================================================================
def verify_certificate(X: Polytope | QuadSet, E: Ellipsoid, C: Certificate, tol: float = LMI_TOL) -> CertificateReport:
    """
    Confere as duas LMIs, sinais dos multiplicadores, folgas SOC e, quando o conjunto
    tem vértices, a forma quadrática da primeira LMI em [v; 1] e a contenção de W·v.
    """
    if isinstance(X, Polytope):
        S, t, quads = X.S, X.t, ()
    else:
        S, t, quads = X.base.S, X.base.t, X.quads
    Kx = S.shape[1] if S.size else np.asarray(C.F).shape[0]
    W = np.eye(E.K) if C.lift is None else np.asarray(C.lift, dtype=float)
    if W.shape != (E.K, Kx) or np.asarray(C.F).shape != (Kx, Kx):
        raise DimensionMismatchError("certificado com dimensões incompatíveis")
    J, I = S.shape[0], len(quads)

    view = X if isinstance(X, QuadSet) else _QuadView(S, t, quads)
    has_rlt = len(C.alpha) == I and I > 0 and J > 0
    lam = list(np.asarray(C.lam, dtype=float).reshape(-1)) if I else []
    B1, B2 = lifted_lmis(
        view, W, E.A, E.b[:, None], C.F, np.asarray(C.g)[:, None], C.h,
        C.N if J else None, lam,
        [list(C.alpha[i]) for i in range(I)] if has_rlt else None,
        C.kappa if has_rlt else None,
    )
    B1, B2 = B1.const, B2.const
    P = np.block([[np.asarray(C.F), np.asarray(C.g)[:, None]], [np.asarray(C.g)[None, :], np.array([[C.h - 1.0]])]])

    soc = np.inf
    if has_rlt:
        for i in range(I):
            soc = min(soc, float(np.min(C.kappa[i] - np.linalg.norm(C.alpha[i], axis=1))))

    vertex_form = containment = None
    try:
        V = X.vertices
    except GeometryError:
        V = None
    if V is not None and len(V):
        Vh = np.hstack([V, np.ones((len(V), 1))])
        vertex_form = float(np.max(np.einsum("ij,jk,ik->i", Vh, P, Vh)))
        containment = float(np.max(E.level(V @ W.T)))

    return CertificateReport(
        b1_min_eig=float(np.linalg.eigvalsh(B1).min()),
        b2_min_eig=float(np.linalg.eigvalsh(B2).min()),
        n_min=float(np.min(C.N)) if J else 0.0,
        soc_min_slack=soc if np.isfinite(soc) else 0.0,
        lam_min=float(np.min(C.lam)) if I else 0.0,
        vertex_form_max=vertex_form,
        containment_max=containment,
        tol=tol,
    )


@dataclass
class _QuadView:
    """Politopo visto como conjunto sem quádricas (para reaproveitar lifted_lmis)."""

    S: np.ndarray
    t: np.ndarray
    quads: tuple = ()

    @property
    def base(self):
        return self

    @property
    def K(self) -> int:
        return self.S.shape[1]


# ======================================================================
# LEVANTAMENTO DO DUAL DO SMVIE
# ======================================================================
def smvie_dual_objective(P: Polytope, Lam: np.ndarray, rho: np.ndarray) -> float:
    """K rho't - K - logdet(-(S'Lam + Lam'S)/2): log do volume do SMVIE no ótimo."""
    G = -0.5 * (P.S.T @ Lam + Lam.T @ P.S)
    sign, ld = np.linalg.slogdet(G)
    if sign <= 0:
        raise InfeasibleDualError("-(S'Lam + Lam'S)/2 não é definida positiva")
    return float(P.K * (rho @ P.t) - P.K - ld)


def check_smvie_dual(P: Polytope, Lam: np.ndarray, rho: np.ndarray, tol: float = 1e-8) -> None:
    Lam = np.asarray(Lam, dtype=float)
    rho = np.asarray(rho, dtype=float).reshape(-1)
    if Lam.shape != P.S.shape or rho.size != P.J:
        raise DimensionMismatchError(f"Lam {Lam.shape} / rho {rho.shape} incompatíveis com S {P.S.shape}")
    scale = max(1.0, float(np.abs(rho).max(initial=0.0)))
    if np.abs(P.S.T @ rho).max(initial=0.0) > tol * scale:
        raise InfeasibleDualError(f"S'rho != 0 (resíduo {np.abs(P.S.T @ rho).max():.3g})")
    slack = rho - np.linalg.norm(Lam, axis=1)
    if slack.min() < -SIGN_TOL:
        raise InfeasibleDualError(f"||Lam_j|| > rho_j (folga {slack.min():.3g})")


def lift_smvie_certificate(P: Polytope, Lam: np.ndarray, rho: np.ndarray) -> tuple[Ellipsoid, Certificate]:
    """
    Constrói (A, b, N) viável para o problema copositivo a partir de um dual viável do SMVIE:
    kappa = exp(1 - rho't), Lam'S = U Sigma V', A = kappa V Sigma V', b = -kappa V U' Lam't,
    N = kappa^2 (rho rho' - Lam Lam'), e [[F, g], [g', h]] = [A b]'[A b].
    """
    Lam = np.asarray(Lam, dtype=float)
    rho = np.asarray(rho, dtype=float).reshape(-1)
    check_smvie_dual(P, Lam, rho)
    dual = smvie_dual_objective(P, Lam, rho)

    kap = float(np.exp(1.0 - rho @ P.t))
    U, sig, Vt = np.linalg.svd(Lam.T @ P.S)
    V = Vt.T
    if sig.min() <= 0.0:
        raise InfeasibleDualError("Lam'S singular")
    A = kap * (V * sig) @ V.T
    A = 0.5 * (A + A.T)
    b = -kap * V @ U.T @ Lam.T @ P.t
    N = kap**2 * (np.outer(rho, rho) - Lam @ Lam.T)
    Ab = np.hstack([A, b[:, None]])
    H = Ab.T @ Ab
    K = P.K
    E = Ellipsoid(A, b)
    if -E.logdet > dual + 1e-7:
        raise MveError(f"levantamento piorou o objetivo: {-E.logdet:.10g} > {dual:.10g}")
    cert = Certificate(N=N, F=H[:K, :K], g=H[:K, K], h=float(H[K, K]), info={"dual_objective": dual})
    return E, cert
