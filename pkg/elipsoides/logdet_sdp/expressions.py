# elipsoides/logdet_sdp/expressions.py
from __future__ import annotations

from numbers import Number
from typing import Iterable, Mapping

import numpy as np

from .errors import ModelError


def _const_matrix(value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ModelError(f"constante com ndim={arr.ndim}")
    return arr


class Affine:
    """
    Expressão afim matricial r x c nas variáveis registradas:
        const + sum_v  coef[v] . x_v
    coef[v] tem shape (r, c, tamanho de v).
    """

    # ndarray @ Affine cai no __rmatmul__
    __array_ufunc__ = None

    __slots__ = ("const", "coefs")

    def __init__(self, const, coefs: Mapping[str, np.ndarray] | None = None):
        self.const = _const_matrix(const)
        self.coefs: dict[str, np.ndarray] = {}
        for name, arr in (coefs or {}).items():
            arr = np.asarray(arr, dtype=float)
            if arr.shape[:2] != self.const.shape:
                raise ModelError(f"coeficiente de {name} com shape {arr.shape}, esperado {self.const.shape}+(n,)")
            self.coefs[name] = arr

    # ------------------------------------------------------------------
    # forma
    # ------------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.const.shape

    @property
    def variables(self) -> set[str]:
        return set(self.coefs)

    @property
    def is_constant(self) -> bool:
        return not any(np.any(c) for c in self.coefs.values())

    def __repr__(self) -> str:
        return f"Affine(shape={self.shape}, vars={sorted(self.coefs)})"

    # ------------------------------------------------------------------
    # aritmética
    # ------------------------------------------------------------------
    def _combine(self, other: "Affine", sign: float) -> "Affine":
        if other.shape != self.shape:
            raise ModelError(f"shapes incompatíveis: {self.shape} e {other.shape}")
        coefs = {k: v.copy() for k, v in self.coefs.items()}
        for k, v in other.coefs.items():
            if k in coefs:
                coefs[k] = coefs[k] + sign * v
            else:
                coefs[k] = sign * v
        return Affine(self.const + sign * other.const, coefs)

    def __add__(self, other) -> "Affine":
        if isinstance(other, Number) and other == 0:
            return self
        return self._combine(as_affine(other), 1.0)

    def __radd__(self, other) -> "Affine":
        return self.__add__(other)

    def __sub__(self, other) -> "Affine":
        return self._combine(as_affine(other), -1.0)

    def __rsub__(self, other) -> "Affine":
        return as_affine(other)._combine(self, -1.0)

    def __neg__(self) -> "Affine":
        return self * -1.0

    def __mul__(self, other) -> "Affine":
        if isinstance(other, Affine):
            if other.is_constant and other.shape == (1, 1):
                return self * float(other.const[0, 0])
            if self.is_constant and self.shape == (1, 1):
                return other * float(self.const[0, 0])
            raise ModelError("produto de duas expressões não é afim")
        if isinstance(other, Number):
            s = float(other)
            return Affine(self.const * s, {k: v * s for k, v in self.coefs.items()})
        M = _const_matrix(other)
        if M.shape == (1, 1):
            return self * float(M[0, 0])
        if self.shape != (1, 1):
            raise ModelError(f"escala por matriz exige expressão 1x1, veio {self.shape}")
        return Affine(
            M * self.const[0, 0],
            {k: M[:, :, None] * v[0, 0][None, None, :] for k, v in self.coefs.items()},
        )

    def __rmul__(self, other) -> "Affine":
        return self.__mul__(other)

    def __truediv__(self, other) -> "Affine":
        if not isinstance(other, Number):
            raise ModelError("divisão só por escalar")
        return self * (1.0 / float(other))

    def __matmul__(self, other) -> "Affine":
        if isinstance(other, Affine):
            if other.is_constant:
                other = other.const
            elif self.is_constant:
                return self.const @ other
            else:
                raise ModelError("produto de duas expressões não é afim")
        M = _const_matrix(other)
        if M.shape[0] != self.shape[1]:
            raise ModelError(f"matmul {self.shape} @ {M.shape}")
        return Affine(
            self.const @ M,
            {k: np.einsum("rcs,cq->rqs", v, M) for k, v in self.coefs.items()},
        )

    def __rmatmul__(self, other) -> "Affine":
        M = np.asarray(other, dtype=float)
        if M.ndim == 1:
            M = M.reshape(1, -1)
        if M.shape[1] != self.shape[0]:
            raise ModelError(f"matmul {M.shape} @ {self.shape}")
        return Affine(
            M @ self.const,
            {k: np.einsum("pr,rcs->pcs", M, v) for k, v in self.coefs.items()},
        )

    @property
    def T(self) -> "Affine":
        return Affine(self.const.T, {k: v.transpose(1, 0, 2) for k, v in self.coefs.items()})

    def __getitem__(self, key) -> "Affine":
        if not isinstance(key, tuple):
            key = (key, slice(None))
        const = self.const[key]
        coefs = {k: v[key + (slice(None),)] for k, v in self.coefs.items()}
        if const.ndim == 0:
            return Affine(const.reshape(1, 1), {k: v.reshape(1, 1, -1) for k, v in coefs.items()})
        if const.ndim == 1:
            n = const.size
            return Affine(const.reshape(n, 1), {k: v.reshape(n, 1, -1) for k, v in coefs.items()})
        return Affine(const, coefs)

    # ------------------------------------------------------------------
    # reduções
    # ------------------------------------------------------------------
    def inner(self, M) -> "Affine":
        """<M, self> = sum_ij M_ij self_ij, como expressão 1x1."""
        M = _const_matrix(M)
        if M.shape != self.shape:
            raise ModelError(f"inner {M.shape} com {self.shape}")
        return Affine(
            np.array([[np.sum(M * self.const)]]),
            {k: np.einsum("rc,rcs->s", M, v)[None, None, :] for k, v in self.coefs.items()},
        )

    def trace(self) -> "Affine":
        r, c = self.shape
        if r != c:
            raise ModelError("traço de matriz não quadrada")
        return self.inner(np.eye(r))

    def sum(self) -> "Affine":
        return self.inner(np.ones(self.shape))

    def symmetrize(self) -> "Affine":
        return (self + self.T) * 0.5

    def asymmetry(self) -> float:
        if self.shape[0] != self.shape[1]:
            return np.inf
        worst = float(np.abs(self.const - self.const.T).max(initial=0.0))
        for v in self.coefs.values():
            worst = max(worst, float(np.abs(v - v.transpose(1, 0, 2)).max(initial=0.0)))
        return worst

    # ------------------------------------------------------------------
    # avaliação / serialização
    # ------------------------------------------------------------------
    def value(self, params: Mapping[str, np.ndarray]) -> np.ndarray:
        """Valor numérico, dado o vetor de parâmetros livres de cada variável."""
        out = self.const.copy()
        for k, v in self.coefs.items():
            if k not in params:
                raise ModelError(f"variável desconhecida: {k}")
            out += v @ np.asarray(params[k], dtype=float)
        return out

    def to_dict(self) -> dict:
        return {
            "const": self.const.tolist(),
            "coefs": {k: v.tolist() for k, v in self.coefs.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Affine":
        const = np.array(data["const"], dtype=float).reshape(np.shape(data["const"]))
        coefs = {}
        for k, v in data.get("coefs", {}).items():
            arr = np.array(v, dtype=float)
            coefs[k] = arr.reshape(const.shape + (-1,)) if arr.size else np.zeros(const.shape + (0,))
        return cls(const, coefs)


Expr = Affine


def as_affine(value) -> Affine:
    if isinstance(value, Affine):
        return value
    return Affine(value)


def _shape_of(item) -> tuple[int, int] | None:
    if item is None:
        return None
    if isinstance(item, Number) and item == 0:
        return None
    return as_affine(item).shape


def bmat(rows: Iterable[Iterable]) -> Affine:
    """Monta uma matriz em blocos. None ou 0 vira bloco de zeros com a dimensão inferida."""
    rows = [list(r) for r in rows]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ModelError("bmat precisa de linhas com o mesmo número de blocos")
    nr, nc = len(rows), len(rows[0])
    heights: list[int | None] = [None] * nr
    widths: list[int | None] = [None] * nc
    for i, row in enumerate(rows):
        for j, item in enumerate(row):
            shp = _shape_of(item)
            if shp is None:
                continue
            if heights[i] not in (None, shp[0]) or widths[j] not in (None, shp[1]):
                raise ModelError(f"bloco ({i},{j}) com shape {shp} incompatível")
            heights[i], widths[j] = shp[0], shp[1]
    if any(h is None for h in heights) or any(w is None for w in widths):
        raise ModelError("bmat não conseguiu inferir todas as dimensões")

    row_off = np.concatenate([[0], np.cumsum(heights)]).astype(int)
    col_off = np.concatenate([[0], np.cumsum(widths)]).astype(int)
    H, W = int(row_off[-1]), int(col_off[-1])

    const = np.zeros((H, W))
    sizes: dict[str, int] = {}
    blocks: list[tuple[int, int, Affine]] = []
    for i, row in enumerate(rows):
        for j, item in enumerate(row):
            if _shape_of(item) is None:
                continue
            a = as_affine(item)
            blocks.append((i, j, a))
            for k, v in a.coefs.items():
                sizes[k] = v.shape[2]
    coefs = {k: np.zeros((H, W, s)) for k, s in sizes.items()}
    for i, j, a in blocks:
        rs = slice(row_off[i], row_off[i + 1])
        cs = slice(col_off[j], col_off[j + 1])
        const[rs, cs] = a.const
        for k, v in a.coefs.items():
            coefs[k][rs, cs, :] = v
    return Affine(const, coefs)


def hstack(items: Iterable) -> Affine:
    return bmat([list(items)])


def vstack(items: Iterable) -> Affine:
    return bmat([[it] for it in items])


def affine_sum(items: Iterable) -> Affine:
    total = None
    for it in items:
        total = as_affine(it) if total is None else total + it
    if total is None:
        raise ModelError("soma vazia")
    return total
