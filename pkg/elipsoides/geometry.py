# elipsoides/geometry.py
from __future__ import annotations

import itertools
import logging
from dataclasses import InitVar, dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

logger = logging.getLogger(__name__)

SYM_TOL = 1e-12
DEDUP_TOL = 1e-8
FEAS_SLACK = 1e-9
VERTEX_LIMIT = 8


class GeometryError(ValueError):
    """Erro genérico de geometria (dados inválidos ou degenerados)."""


class InvalidEllipsoidError(GeometryError):
    """Matriz de forma não simétrica ou não definida positiva."""


class DimensionMismatchError(GeometryError):
    """Dimensões incompatíveis entre objetos."""


class UnboundedPolytopeError(GeometryError):
    """Politopo ilimitado."""


class DegeneratePolytopeError(GeometryError):
    """Politopo vazio ou sem interior."""


class PartitionError(GeometryError):
    """Sementes inválidas ou células degeneradas."""


def _as_matrix(a, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} precisa ser matriz, veio shape {arr.shape}")
    return arr


def _as_vector(a, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(-1)
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


# ======================================================================
# ELIPSOIDE
# ======================================================================
@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """
    Elipsoide {x : ||A x + b||^2 <= 1}.
    Volume na convenção 1/det(A) (sem a constante da bola unitária).
    """

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        b = _as_vector(self.b, "b")
        K = A.shape[0]
        if A.shape != (K, K) or b.shape != (K,):
            raise DimensionMismatchError(f"A {A.shape} e b {b.shape} incompatíveis")
        scale = max(1.0, float(np.abs(A).max(initial=0.0)))
        if np.abs(A - A.T).max(initial=0.0) > SYM_TOL * scale:
            raise InvalidEllipsoidError("A não é simétrica")
        A = 0.5 * (A + A.T)
        if K == 0 or np.linalg.eigvalsh(A).min() <= 0.0:
            raise InvalidEllipsoidError("A não é definida positiva")
        object.__setattr__(self, "A", _freeze(A))
        object.__setattr__(self, "b", _freeze(b))

    @classmethod
    def ball(cls, center, radius: float) -> "Ellipsoid":
        c = _as_vector(center, "center")
        A = np.eye(c.size) / float(radius)
        return cls(A, -A @ c)

    @classmethod
    def from_center_shape(cls, center, shape) -> "Ellipsoid":
        """Elipsoide {x : (x-c)' P^-1 (x-c) <= 1} a partir do centro c e da matriz P."""
        c = _as_vector(center, "center")
        P = _as_matrix(shape, "shape")
        w, U = np.linalg.eigh(0.5 * (P + P.T))
        if w.min() <= 0.0:
            raise InvalidEllipsoidError("matriz de forma não é definida positiva")
        A = (U / np.sqrt(w)) @ U.T
        A = 0.5 * (A + A.T)
        return cls(A, -A @ c)

    @property
    def K(self) -> int:
        return self.A.shape[0]

    @cached_property
    def logdet(self) -> float:
        sign, value = np.linalg.slogdet(self.A)
        return float(value)

    @property
    def volume(self) -> float:
        return float(np.exp(-self.logdet))

    @property
    def radius(self) -> float:
        return float(np.exp(-self.logdet / self.K))

    @cached_property
    def center(self) -> np.ndarray:
        return _freeze(-np.linalg.solve(self.A, self.b))

    def level(self, x) -> np.ndarray:
        """||A x + b||^2 para um ponto ou para as linhas de uma matriz de pontos."""
        X = np.asarray(x, dtype=float)
        if X.shape[-1] != self.K:
            raise DimensionMismatchError(f"ponto de dimensão {X.shape[-1]}, elipsoide K={self.K}")
        r = X @ self.A.T + self.b
        return np.sum(r * r, axis=-1)

    def contains(self, x, tol: float = 1e-9) -> bool:
        return bool(np.all(self.level(x) <= 1.0 + tol))

    def boundary(self, count: int = 256, rng: np.random.Generator | None = None) -> np.ndarray:
        """
        Pontos da fronteira. Em K=2 (sem rng) usa uma grade angular regular,
        nos outros casos direções aleatórias.
        """
        if self.K == 2 and rng is None:
            theta = 2.0 * np.pi * np.arange(count) / count
            U = np.column_stack([np.cos(theta), np.sin(theta)])
        else:
            rng = rng or np.random.default_rng(0)
            U = rng.standard_normal((count, self.K))
            U /= np.linalg.norm(U, axis=1, keepdims=True)
        return np.linalg.solve(self.A, (U - self.b).T).T

    def to_dict(self) -> dict:
        return {"A": self.A.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Ellipsoid":
        return cls(data["A"], data["b"])


def ellipsoid_volume(E: Ellipsoid) -> float:
    return E.volume


def ellipsoid_contains(E: Ellipsoid, x, tol: float = 1e-9) -> bool:
    x = _as_vector(x, "x")
    if x.size != E.K:
        raise DimensionMismatchError(f"ponto de dimensão {x.size}, elipsoide K={E.K}")
    return E.contains(x, tol)


# ======================================================================
# POLITOPO
# ======================================================================
@dataclass(frozen=True, eq=False)
class Polytope:
    """Politopo {x : S x <= t}. Os vértices são calculados sob demanda e guardados."""

    S: np.ndarray
    t: np.ndarray
    known_vertices: InitVar[np.ndarray | None] = None

    def __post_init__(self, known_vertices):
        S = _as_matrix(self.S, "S")
        t = _as_vector(self.t, "t")
        if S.shape[0] != t.size:
            raise DimensionMismatchError(f"S tem {S.shape[0]} linhas e t tem {t.size}")
        object.__setattr__(self, "S", _freeze(S))
        object.__setattr__(self, "t", _freeze(t))
        if known_vertices is not None:
            V = np.array(known_vertices, dtype=float).reshape(-1, S.shape[1])
            if V.size and np.any(V @ S.T > t + FEAS_SLACK):
                raise GeometryError("vértice informado viola as desigualdades")
            self.__dict__["vertices"] = _freeze(V)

    @property
    def J(self) -> int:
        return self.S.shape[0]

    @property
    def K(self) -> int:
        return self.S.shape[1]

    @cached_property
    def vertices(self) -> np.ndarray:
        return _freeze(enumerate_vertices(self))

    @property
    def interior_point(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.K <= VERTEX_LIMIT or "vertices" in self.__dict__:
            V = self.vertices
            return V.min(axis=0), V.max(axis=0)
        lo, hi = np.empty(self.K), np.empty(self.K)
        for k in range(self.K):
            for sign, out in ((1.0, lo), (-1.0, hi)):
                res = linprog(sign * np.eye(self.K)[k], A_ub=self.S, b_ub=self.t, bounds=[(None, None)] * self.K, method="highs")
                if res.status != 0:
                    raise UnboundedPolytopeError(f"politopo ilimitado na coordenada {k}")
                out[k] = res.x[k]
        return lo, hi

    def contains(self, x, tol: float = 1e-9) -> bool:
        X = np.asarray(x, dtype=float)
        return bool(np.all(X @ self.S.T <= self.t + tol))

    def image(self, T, shift=None) -> "Polytope":
        """Imagem {T x + shift : x em P} para T inversível."""
        T = _as_matrix(T, "T")
        shift = np.zeros(self.K) if shift is None else _as_vector(shift, "shift")
        Tinv = np.linalg.inv(T)
        S = self.S @ Tinv
        known = None
        if "vertices" in self.__dict__:
            known = self.vertices @ T.T + shift
        return Polytope(S, self.t + S @ shift, known_vertices=known)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Amostra uniforme por rejeição a partir da caixa envolvente."""
        lo, hi = self.bounding_box()
        out: list[np.ndarray] = []
        total = 0
        while total < count:
            X = rng.uniform(lo, hi, size=(max(2 * (count - total), 16), self.K))
            X = X[np.all(X @ self.S.T <= self.t, axis=1)]
            out.append(X)
            total += len(X)
        return np.vstack(out)[:count]

    def to_dict(self) -> dict:
        return {"S": self.S.tolist(), "t": self.t.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Polytope":
        S = np.array(data["S"], dtype=float)
        if S.ndim == 1:
            S = S.reshape(0, len(data.get("center", []))) if S.size == 0 else S.reshape(1, -1)
        return cls(S, data["t"])


def _candidate_points(S: np.ndarray, t: np.ndarray) -> np.ndarray:
    J, K = S.shape
    found: list[np.ndarray] = []
    for rows in itertools.combinations(range(J), K):
        sub = S[list(rows)]
        if np.linalg.cond(sub) > 1e12:
            continue
        v = np.linalg.solve(sub, t[list(rows)])
        if np.any(S @ v > t + FEAS_SLACK):
            continue
        if any(np.abs(v - w).max() <= DEDUP_TOL for w in found):
            continue
        found.append(v)
    if not found:
        return np.zeros((0, K))
    V = np.array(found)
    order = np.lexsort(V.T[::-1])
    return V[order]


def candidate_vertices(P: Polytope) -> np.ndarray:
    """Pontos básicos viáveis de P, sem exigir dimensão cheia (aceita politopos de um ponto só)."""
    return _candidate_points(P.S, P.t)


def is_bounded(P: Polytope) -> bool:
    S = P.S
    if S.shape[0] == 0 or np.linalg.matrix_rank(S) < P.K:
        return False
    # limitado <=> existe y > 0 com S'y = 0 (Gordan)
    res = linprog(
        c=np.zeros(P.J),
        A_eq=S.T,
        b_eq=np.zeros(P.K),
        bounds=[(1.0, None)] * P.J,
        method="highs",
    )
    return res.status == 0


def affine_rank(points: np.ndarray, tol: float = 1e-9) -> int:
    points = np.asarray(points, dtype=float)
    if len(points) <= 1:
        return 0
    return int(np.linalg.matrix_rank(points[1:] - points[0], tol=tol))


def enumerate_vertices(P: Polytope) -> np.ndarray:
    """
    Enumeração por força bruta sobre todos os subconjuntos de K linhas.
    Só serve em escala de mesa (K <= ~8, J <= ~40).
    """
    if not is_bounded(P):
        raise UnboundedPolytopeError(f"politopo ilimitado (J={P.J}, K={P.K})")
    V = _candidate_points(P.S, P.t)
    if len(V) == 0:
        raise DegeneratePolytopeError("politopo vazio")
    if affine_rank(V) < P.K:
        raise DegeneratePolytopeError(f"politopo sem interior: posto afim {affine_rank(V)} < {P.K}")
    return V


def chebyshev_center(P: Polytope) -> tuple[np.ndarray, float]:
    """Centro e raio da maior bola inscrita (PL); alternativa à enumeração acima de VERTEX_LIMIT."""
    norms = np.linalg.norm(P.S, axis=1)
    res = linprog(
        c=np.append(np.zeros(P.K), -1.0),
        A_ub=np.hstack([P.S, norms[:, None]]),
        b_ub=P.t,
        bounds=[(None, None)] * P.K + [(0.0, None)],
        method="highs",
    )
    if res.status == 3:
        raise UnboundedPolytopeError(f"politopo ilimitado (J={P.J}, K={P.K})")
    if res.status != 0 or -res.fun <= DEDUP_TOL:
        raise DegeneratePolytopeError("politopo vazio ou sem interior")
    return res.x[: P.K], float(-res.fun)


def in_convex_hull(points: np.ndarray, x) -> bool:
    """Viabilidade de x = V' w, w >= 0, sum w = 1 (PL pequeno)."""
    V = np.asarray(points, dtype=float)
    x = _as_vector(x, "x")
    n = len(V)
    res = linprog(
        c=np.zeros(n),
        A_eq=np.vstack([V.T, np.ones((1, n))]),
        b_eq=np.append(x, 1.0),
        bounds=[(0.0, None)] * n,
        method="highs",
    )
    return res.status == 0


# ======================================================================
# CONJUNTO COM RESTRIÇÕES QUADRÁTICAS
# ======================================================================
@dataclass(frozen=True, eq=False)
class QuadSet:
    """
    {x : S x <= t, ||Q_i x + q_i||^2 <= 1 para todo i}.
    Q_i pode ser retangular (p_i x K). Guarda um ponto testemunha do conjunto.
    """

    base: Polytope
    quads: tuple[tuple[np.ndarray, np.ndarray], ...] = ()
    witness: np.ndarray | None = None

    def __post_init__(self):
        K = self.base.K
        quads = []
        for Q, q in self.quads:
            Q = _as_matrix(Q, "Q")
            q = _as_vector(q, "q")
            if Q.shape[1] != K or Q.shape[0] != q.size:
                raise DimensionMismatchError(f"Q {Q.shape} / q {q.shape} incompatíveis com K={K}")
            quads.append((_freeze(Q), _freeze(q)))
        object.__setattr__(self, "quads", tuple(quads))
        w = self.witness
        if w is None:
            w = self._find_witness()
        w = _as_vector(w, "witness")
        if w.size != K or not membership(self, w, tol=1e-9):
            raise GeometryError("testemunha fora do conjunto")
        object.__setattr__(self, "witness", _freeze(w))

    @property
    def K(self) -> int:
        return self.base.K

    def _find_witness(self) -> np.ndarray:
        candidates: list[np.ndarray] = []
        try:
            candidates.append(self.base.interior_point)
        except GeometryError:
            pass
        for Q, q in self.quads:
            candidates.append(-np.linalg.lstsq(Q, q, rcond=None)[0])
        for a, b in itertools.combinations(list(candidates), 2):
            candidates.append(0.5 * (a + b))
        for c in candidates:
            if _strict_member(self, c):
                return c
        for c in candidates:
            if membership(self, c, tol=0.0):
                return c
        raise GeometryError("não encontrei ponto no conjunto; informe witness")

    @property
    def vertices(self) -> np.ndarray:
        """Vértices do politopo base que satisfazem as restrições quadráticas."""
        V = self.base.vertices
        if not self.quads:
            return V
        keep = np.ones(len(V), dtype=bool)
        for Q, q in self.quads:
            keep &= np.sum((V @ Q.T + q) ** 2, axis=1) <= 1.0 + FEAS_SLACK
        return V[keep]

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.full(self.K, -np.inf)
        hi = np.full(self.K, np.inf)
        try:
            lo, hi = self.base.bounding_box()
        except GeometryError:
            pass
        for Q, q in self.quads:
            G = Q.T @ Q
            if np.linalg.matrix_rank(G) < self.K:
                continue
            c = -np.linalg.lstsq(Q, q, rcond=None)[0]
            half = np.sqrt(np.diag(np.linalg.inv(G)))
            lo = np.maximum(lo, c - half)
            hi = np.minimum(hi, c + half)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise UnboundedPolytopeError("conjunto sem caixa envolvente finita")
        return lo, hi

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        lo, hi = self.bounding_box()
        out: list[np.ndarray] = []
        total = 0
        while total < count:
            X = rng.uniform(lo, hi, size=(max(4 * (count - total), 64), self.K))
            keep = np.all(X @ self.base.S.T <= self.base.t, axis=1)
            for Q, q in self.quads:
                keep &= np.sum((X @ Q.T + q) ** 2, axis=1) <= 1.0
            out.append(X[keep])
            total += int(keep.sum())
        return np.vstack(out)[:count]

    def to_dict(self) -> dict:
        return {
            **self.base.to_dict(),
            "K": self.K,
            "quads": [{"Q": Q.tolist(), "q": q.tolist()} for Q, q in self.quads],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QuadSet":
        K = int(data.get("K") or np.array(data["quads"][0]["Q"]).shape[1])
        S = np.array(data.get("S") or [], dtype=float).reshape(-1, K)
        base = Polytope(S, np.array(data.get("t") or [], dtype=float))
        quads = tuple((np.array(d["Q"], dtype=float), np.array(d["q"], dtype=float)) for d in data["quads"])
        return cls(base, quads)


def _strict_member(X: QuadSet, x: np.ndarray, margin: float = 1e-9) -> bool:
    if np.any(X.base.S @ x > X.base.t - margin):
        return False
    return all(np.sum((Q @ x + q) ** 2) < 1.0 - margin for Q, q in X.quads)


def membership(X: Polytope | QuadSet, x, tol: float = 1e-9) -> bool:
    x = _as_vector(x, "x")
    if x.size != X.K:
        raise DimensionMismatchError(f"ponto de dimensão {x.size}, conjunto K={X.K}")
    if isinstance(X, Polytope):
        return X.contains(x, tol)
    if not X.base.contains(x, tol):
        return False
    return all(float(np.sum((Q @ x + q) ** 2)) <= 1.0 + tol for Q, q in X.quads)


def unbounded_space(K: int) -> Polytope:
    """Politopo sem linhas (todo o R^K); usado como base de conjuntos só quadráticos."""
    return Polytope(np.zeros((0, K)), np.zeros(0))


# ======================================================================
# PARTIÇÃO DE VORONOI
# ======================================================================
@dataclass(frozen=True, eq=False)
class PartitionFamily:
    parent: Polytope
    seeds: np.ndarray
    cells: tuple[Polytope, ...] = field(default_factory=tuple)

    @property
    def J(self) -> int:
        return len(self.cells)

    def locate(self, x, tol: float = 1e-9) -> list[int]:
        return [j for j, cell in enumerate(self.cells) if cell.contains(x, tol)]

    def covers(self, points: np.ndarray, tol: float = 1e-9) -> bool:
        X = np.asarray(points, dtype=float)
        inside = np.zeros(len(X), dtype=bool)
        for cell in self.cells:
            inside |= np.all(X @ cell.S.T <= cell.t + tol, axis=1)
        return bool(inside.all())

    def to_dict(self) -> dict:
        return {
            "parent": self.parent.to_dict(),
            "seeds": self.seeds.tolist(),
            "cells": [c.to_dict() for c in self.cells],
        }


def voronoi_partition(P: Polytope, seeds: Sequence) -> PartitionFamily:
    seeds = np.array(seeds, dtype=float).reshape(-1, P.K)
    if len(seeds) == 0:
        raise PartitionError("nenhuma semente")
    for xi in seeds:
        if not P.contains(xi, FEAS_SLACK):
            raise PartitionError(f"semente {xi.tolist()} fora do politopo")
    for i, j in itertools.combinations(range(len(seeds)), 2):
        if np.linalg.norm(seeds[i] - seeds[j]) <= 1e-8:
            raise PartitionError(f"sementes {i} e {j} coincidem")

    sq = np.sum(seeds * seeds, axis=1)
    cells = []
    for j, xj in enumerate(seeds):
        others = [i for i in range(len(seeds)) if i != j]
        S = np.vstack([P.S] + [2.0 * (seeds[i] - xj)[None, :] for i in others])
        t = np.concatenate([P.t, [sq[i] - sq[j] for i in others]])
        cell = Polytope(S, t)
        try:
            if P.K <= VERTEX_LIMIT:
                cell.vertices
            else:
                chebyshev_center(cell)
        except GeometryError as e:
            raise PartitionError(f"célula {j} degenerada: {e}") from e
        cells.append(cell)
    logger.debug("partição de Voronoi com %s células", len(cells))
    return PartitionFamily(parent=P, seeds=_freeze(seeds), cells=tuple(cells))
