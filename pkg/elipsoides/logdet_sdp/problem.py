# elipsoides/logdet_sdp/problem.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ModelError
from .expressions import Affine, as_affine, bmat

logger = logging.getLogger(__name__)

SYM, MAT, VEC, SCALAR = "sym", "mat", "vec", "scalar"
SENSES = ("<=", ">=", "==")


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str
    shape: tuple[int, int]
    nonneg: bool = False

    @property
    def size(self) -> int:
        r, c = self.shape
        if self.kind == SYM:
            return r * (r + 1) // 2
        return r * c

    def basis(self) -> np.ndarray:
        """Coeficientes (r, c, size) que levam os parâmetros livres na matriz."""
        r, c = self.shape
        if self.kind == SYM:
            coef = np.zeros((r, r, self.size))
            iu, ju = np.triu_indices(r)
            k = np.arange(self.size)
            coef[iu, ju, k] = 1.0
            coef[ju, iu, k] = 1.0
            return coef
        return np.eye(r * c).reshape(r, c, r * c)

    def expr(self) -> Affine:
        return Affine(np.zeros(self.shape), {self.name: self.basis()})

    def unpack(self, params: np.ndarray):
        params = np.asarray(params, dtype=float)
        r, c = self.shape
        if self.kind == SYM:
            M = np.zeros((r, r))
            iu, ju = np.triu_indices(r)
            M[iu, ju] = params
            M[ju, iu] = params
            return M
        if self.kind == VEC:
            return params.copy()
        if self.kind == SCALAR:
            return float(params[0])
        return params.reshape(r, c)

    def pack(self, value) -> np.ndarray:
        r, c = self.shape
        arr = np.asarray(value, dtype=float)
        if self.kind == SYM:
            arr = arr.reshape(r, r)
            arr = 0.5 * (arr + arr.T)
            return arr[np.triu_indices(r)]
        if arr.size != r * c:
            raise ModelError(f"valor de {self.name} com {arr.size} entradas, esperado {r * c}")
        return arr.reshape(-1)

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "shape": list(self.shape), "nonneg": self.nonneg}


class SdpProblem:
    """
    Modelo declarativo:
        minimizar  -logdet(F(x)) + c(x)
        sujeito a  blocos PSD afins, linhas SOC (como blocos seta),
                   desigualdades e igualdades lineares, variáveis >= 0.
    Depois de resolvido pela primeira vez o modelo não deve mais mudar.
    """

    def __init__(self):
        self.variables: dict[str, Variable] = {}
        self.psd_blocks: list[tuple[str, Affine]] = []
        self.inequalities: list[tuple[str, Affine]] = []
        self.equalities: list[tuple[str, Affine]] = []
        self.logdet: Affine | None = None
        self.linear: Affine | None = None
        self._objective_set = False
        self.soc_count = 0

    # ------------------------------------------------------------------
    # variáveis
    # ------------------------------------------------------------------
    def _register(self, var: Variable) -> Affine:
        if var.name in self.variables:
            raise ModelError(f"variável já registrada: {var.name}")
        if min(var.shape) < 1:
            raise ModelError(f"variável {var.name} com shape {var.shape}")
        self.variables[var.name] = var
        return var.expr()

    def add_matrix_variable(self, name: str, n: int, symmetric: bool = True, nonneg: bool = False, cols: int | None = None) -> Affine:
        if symmetric:
            if cols not in (None, n):
                raise ModelError("matriz simétrica precisa ser quadrada")
            return self._register(Variable(name, SYM, (n, n), nonneg))
        return self._register(Variable(name, MAT, (n, cols or n), nonneg))

    def add_vector_variable(self, name: str, n: int, nonneg: bool = False) -> Affine:
        return self._register(Variable(name, VEC, (n, 1), nonneg))

    def add_scalar_variable(self, name: str, nonneg: bool = False) -> Affine:
        return self._register(Variable(name, SCALAR, (1, 1), nonneg))

    # ------------------------------------------------------------------
    # restrições
    # ------------------------------------------------------------------
    def _check_vars(self, expr: Affine):
        unknown = expr.variables - set(self.variables)
        if unknown:
            raise ModelError(f"variável desconhecida: {sorted(unknown)}")
        for name in expr.variables:
            if expr.coefs[name].shape[2] != self.variables[name].size:
                raise ModelError(f"coeficiente de {name} não bate com o tamanho registrado")

    def add_psd_constraint(self, expr, name: str | None = None) -> str:
        expr = as_affine(expr)
        self._check_vars(expr)
        r, c = expr.shape
        if r != c:
            raise ModelError(f"bloco PSD não quadrado: {expr.shape}")
        scale = max(1.0, float(np.abs(expr.const).max(initial=0.0)))
        if expr.asymmetry() > 1e-12 * scale:
            raise ModelError(f"bloco PSD não simétrico (assimetria {expr.asymmetry():.3g})")
        name = name or f"psd{len(self.psd_blocks)}"
        self.psd_blocks.append((name, expr.symmetrize()))
        return name

    def add_soc_constraint(self, u, w, name: str | None = None) -> str:
        """||u|| <= w, embutida como bloco seta [[w I, u], [u', w]] >= 0."""
        u = as_affine(u)
        w = as_affine(w)
        if u.shape[1] != 1 or w.shape != (1, 1):
            raise ModelError(f"SOC espera u coluna e w escalar, veio {u.shape} e {w.shape}")
        n = u.shape[0]
        wI = w * np.eye(n)
        arrow = bmat([[wI, u], [u.T, w]])
        self.soc_count += 1
        return self.add_psd_constraint(arrow, name or f"soc{self.soc_count - 1}")

    def add_linear_constraint(self, lhs, sense: str, rhs=0.0, name: str | None = None) -> str:
        lhs = as_affine(lhs)
        rhs = as_affine(rhs)
        if rhs.shape == (1, 1) and lhs.shape != (1, 1) and rhs.is_constant:
            rhs = as_affine(np.full(lhs.shape, rhs.const[0, 0]))
        if sense not in SENSES:
            raise ModelError(f"sentido inválido: {sense}")
        diff = lhs - rhs
        self._check_vars(diff)
        if sense == "==":
            name = name or f"eq{len(self.equalities)}"
            self.equalities.append((name, diff))
        else:
            # guardado sempre como g(x) >= 0
            g = diff if sense == ">=" else -diff
            name = name or f"lin{len(self.inequalities)}"
            self.inequalities.append((name, g))
        return name

    def set_objective(self, logdet=None, linear=None) -> None:
        if self._objective_set:
            raise ModelError("objetivo já definido")
        if logdet is None and linear is None:
            raise ModelError("objetivo vazio")
        if logdet is not None:
            logdet = as_affine(logdet)
            self._check_vars(logdet)
            if logdet.shape[0] != logdet.shape[1] or logdet.asymmetry() > 1e-12:
                raise ModelError("termo log-det precisa ser matriz simétrica")
            self.logdet = logdet.symmetrize()
        if linear is not None:
            linear = as_affine(linear)
            if linear.shape != (1, 1):
                raise ModelError(f"custo linear precisa ser escalar, veio {linear.shape}")
            self._check_vars(linear)
            self.linear = linear
        self._objective_set = True

    # ------------------------------------------------------------------
    # consultas
    # ------------------------------------------------------------------
    @property
    def n_params(self) -> int:
        return sum(v.size for v in self.variables.values())

    def offsets(self) -> dict[str, slice]:
        out = {}
        pos = 0
        for name, var in self.variables.items():
            out[name] = slice(pos, pos + var.size)
            pos += var.size
        return out

    def validate(self) -> None:
        if not self._objective_set:
            raise ModelError("objetivo não definido")
        if self.logdet is not None:
            in_blocks = set()
            for _, blk in self.psd_blocks:
                in_blocks |= blk.variables
            loose = self.logdet.variables - in_blocks
            if loose:
                raise ModelError(f"variáveis do log-det fora de qualquer bloco PSD: {sorted(loose)}")

    def split(self, x: np.ndarray) -> dict[str, np.ndarray]:
        """Vetor global -> parâmetros livres por variável."""
        return {name: x[sl] for name, sl in self.offsets().items()}

    def unpack(self, x: np.ndarray) -> dict:
        return {name: self.variables[name].unpack(x[sl]) for name, sl in self.offsets().items()}

    def pack(self, values: Mapping[str, object]) -> np.ndarray:
        """Valores por variável (matrizes, vetores, escalares) -> vetor global. Faltantes viram zero."""
        x = np.zeros(self.n_params)
        for name, sl in self.offsets().items():
            if name in values and values[name] is not None:
                x[sl] = self.variables[name].pack(values[name])
        unknown = set(values) - set(self.variables)
        if unknown:
            raise ModelError(f"variável desconhecida: {sorted(unknown)}")
        return x

    def objective_value(self, x: np.ndarray) -> float:
        params = self.split(x)
        val = 0.0
        if self.linear is not None:
            val += float(self.linear.value(params)[0, 0])
        if self.logdet is not None:
            sign, ld = np.linalg.slogdet(self.logdet.value(params))
            val -= ld if sign > 0 else -np.inf
        return val

    def summary(self) -> dict:
        return {
            "variables": len(self.variables),
            "params": self.n_params,
            "psd_blocks": [blk.shape[0] for _, blk in self.psd_blocks],
            "inequalities": sum(g.shape[0] * g.shape[1] for _, g in self.inequalities),
            "equalities": sum(e.shape[0] * e.shape[1] for _, e in self.equalities),
        }

    # ------------------------------------------------------------------
    # JSON
    # ------------------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "variables": [v.to_dict() for v in self.variables.values()],
            "psd": [{"name": n, "expr": e.to_dict()} for n, e in self.psd_blocks],
            "inequalities": [{"name": n, "expr": e.to_dict()} for n, e in self.inequalities],
            "equalities": [{"name": n, "expr": e.to_dict()} for n, e in self.equalities],
            "objective": {
                "logdet": self.logdet.to_dict() if self.logdet is not None else None,
                "linear": self.linear.to_dict() if self.linear is not None else None,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SdpProblem":
        p = cls()
        for v in data["variables"]:
            var = Variable(v["name"], v["kind"], tuple(v["shape"]), bool(v.get("nonneg", False)))
            p._register(var)
        for item in data.get("psd", []):
            p.psd_blocks.append((item["name"], Affine.from_dict(item["expr"])))
        for item in data.get("inequalities", []):
            p.inequalities.append((item["name"], Affine.from_dict(item["expr"])))
        for item in data.get("equalities", []):
            p.equalities.append((item["name"], Affine.from_dict(item["expr"])))
        obj = data.get("objective") or {}
        if obj.get("logdet") is not None or obj.get("linear") is not None:
            p.set_objective(
                logdet=Affine.from_dict(obj["logdet"]) if obj.get("logdet") is not None else None,
                linear=Affine.from_dict(obj["linear"]) if obj.get("linear") is not None else None,
            )
        return p


def new_problem() -> SdpProblem:
    return SdpProblem()
