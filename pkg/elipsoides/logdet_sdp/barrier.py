# elipsoides/logdet_sdp/barrier.py
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import ModelError
from .problem import SdpProblem
from .report import DEGENERATE, INFEASIBLE, MAX_ITERATIONS, OPTIMAL, SdpSolution, residuals
from .settings import SolverSettings

logger = logging.getLogger(__name__)

REGULARIZATION = 1e-14
MIN_STEP = 1e-14
QUADRATIC_REGION = 0.25


# ======================================================================
# MODELO COMPILADO (no espaço reduzido z, com x = x_p + N z)
# ======================================================================
@dataclass
class _Block:
    name: str
    C: np.ndarray
    G: np.ndarray  # (m, m, ns) nas colunas de support
    support: np.ndarray

    @property
    def m(self) -> int:
        return self.C.shape[0]

    def matrix(self, z: np.ndarray) -> np.ndarray:
        return self.C + self.G @ z[self.support]


@dataclass
class _Compiled:
    n: int
    c: np.ndarray
    c0: float
    objective_block: _Block | None
    blocks: list[_Block]
    A: sp.csr_matrix  # s(z) = b + A z > 0
    b: np.ndarray
    row_labels: list[tuple[str, str, int]] = field(default_factory=list)
    x_p: np.ndarray | None = None
    basis: np.ndarray | None = None

    @property
    def nu(self) -> float:
        return float(sum(blk.m for blk in self.blocks) + self.b.size)

    def to_x(self, z: np.ndarray) -> np.ndarray:
        if self.basis is None:
            return z.copy()
        return self.x_p + self.basis @ z

    def to_z(self, x: np.ndarray) -> np.ndarray:
        if self.basis is None:
            return x.copy()
        return self.basis.T @ (x - self.x_p)

    def f0(self, z: np.ndarray) -> float:
        val = float(self.c @ z) + self.c0
        if self.objective_block is not None:
            sign, ld = np.linalg.slogdet(self.objective_block.matrix(z))
            val -= ld if sign > 0 else -np.inf
        return val


def _dense(expr, offsets: Mapping[str, slice], nx: int) -> tuple[np.ndarray, np.ndarray]:
    r, c = expr.shape
    G = np.zeros((r * c, nx))
    for var, coef in expr.coefs.items():
        G[:, offsets[var]] = coef.reshape(r * c, -1)
    return expr.const.reshape(-1).copy(), G


def _make_block(name: str, const: np.ndarray, G: np.ndarray, m: int) -> _Block:
    support = np.flatnonzero(np.any(G != 0.0, axis=0))
    return _Block(name, const.reshape(m, m), G[:, support].reshape(m, m, support.size), support)


def compile_problem(p: SdpProblem) -> tuple[_Compiled | None, str | None]:
    """Elimina igualdades por espaço nulo e monta os blocos. Devolve (modelo, motivo de inviabilidade)."""
    p.validate()
    offsets = p.offsets()
    nx = p.n_params

    x_p = None
    basis = None
    if p.equalities:
        consts, mats = zip(*(_dense(e, offsets, nx) for _, e in p.equalities))
        e0 = np.concatenate(consts)
        E = np.vstack(mats)
        x_p, *_ = np.linalg.lstsq(E, -e0, rcond=None)
        miss = float(np.abs(E @ x_p + e0).max(initial=0.0))
        if miss > 1e-9 * max(1.0, float(np.abs(e0).max(initial=0.0))):
            return None, f"igualdades inconsistentes (resíduo {miss:.3g})"
        basis = scipy.linalg.null_space(E)

    def reduce(const: np.ndarray, G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if basis is None:
            return const, G
        return const + G @ x_p, G @ basis

    n = nx if basis is None else basis.shape[1]

    blocks = []
    for name, blk in p.psd_blocks:
        const, G = reduce(*_dense(blk, offsets, nx))
        blocks.append(_make_block(name, const, G, blk.shape[0]))

    objective_block = None
    if p.logdet is not None:
        const, G = reduce(*_dense(p.logdet, offsets, nx))
        objective_block = _make_block("logdet", const, G, p.logdet.shape[0])

    c = np.zeros(n)
    c0 = 0.0
    if p.linear is not None:
        const, G = reduce(*_dense(p.linear, offsets, nx))
        c = G.reshape(-1)
        c0 = float(const[0])

    rows_b: list[np.ndarray] = []
    rows_A: list = []
    labels: list[tuple[str, str, int]] = []
    for name, g in p.inequalities:
        const, G = reduce(*_dense(g, offsets, nx))
        rows_b.append(const)
        rows_A.append(sp.csr_matrix(G))
        labels += [("linear", name, i) for i in range(const.size)]
    for name, var in p.variables.items():
        if not var.nonneg:
            continue
        sl = offsets[name]
        sel = sp.identity(nx, format="csr")[sl]
        const = np.zeros(var.size)
        if basis is not None:
            const = x_p[sl].copy()
            sel = sp.csr_matrix(sel @ basis)
        rows_b.append(const)
        rows_A.append(sel)
        labels += [("nonneg", name, i) for i in range(var.size)]
    if rows_A:
        A = sp.vstack(rows_A, format="csr")
        b = np.concatenate(rows_b)
    else:
        A = sp.csr_matrix((0, n))
        b = np.zeros(0)

    return _Compiled(n, c, c0, objective_block, blocks, A, b, labels, x_p, basis), None


# ======================================================================
# BARREIRA
# ======================================================================
def _block_terms(blk: _Block, z: np.ndarray, hessian: bool):
    Z = blk.matrix(z)
    try:
        L = np.linalg.cholesky(Z)
    except np.linalg.LinAlgError:
        return None
    value = -2.0 * float(np.sum(np.log(np.diag(L))))
    if not hessian:
        return value, None, None
    R = scipy.linalg.solve_triangular(L, np.eye(blk.m), lower=True, check_finite=False)
    M = np.einsum("ab,bcs,dc->ads", R, blk.G, R, optimize=True)
    grad = -np.einsum("aas->s", M)
    Mf = M.reshape(blk.m * blk.m, -1)
    return value, grad, Mf.T @ Mf


def _barrier(comp: _Compiled, z: np.ndarray, t: float, hessian: bool = True):
    """phi(z) = t*f0(z) - sum logdet Z_k - sum log s. Devolve None fora do domínio."""
    n = comp.n
    phi = t * (float(comp.c @ z) + comp.c0)
    grad = t * comp.c.copy() if hessian else None
    H = np.zeros((n, n)) if hessian else None

    weighted = [(comp.objective_block, t)] if comp.objective_block is not None else []
    for blk, w in weighted + [(blk, 1.0) for blk in comp.blocks]:
        terms = _block_terms(blk, z, hessian)
        if terms is None:
            return None
        value, g, Hb = terms
        phi += w * value
        if hessian and blk.support.size:
            grad[blk.support] += w * g
            H[np.ix_(blk.support, blk.support)] += w * Hb

    if comp.b.size:
        s = comp.b + comp.A @ z
        if np.any(s <= 0.0):
            return None
        phi -= float(np.sum(np.log(s)))
        if hessian:
            inv = 1.0 / s
            grad -= comp.A.T @ inv
            As = comp.A.multiply(inv[:, None]).tocsr()
            H += (As.T @ As).toarray()
    if not math.isfinite(phi):
        return None
    return phi, grad, H


def _newton_direction(H: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, float]:
    diag = np.diag(H).copy()
    d = np.where(diag > 1e-300, 1.0 / np.sqrt(np.where(diag > 1e-300, diag, 1.0)), 1.0)
    Hs = H * d[:, None] * d[None, :]
    Hs[np.diag_indices_from(Hs)] += REGULARIZATION
    try:
        factor = scipy.linalg.cho_factor(Hs, lower=True, check_finite=False)
        step = scipy.linalg.cho_solve(factor, -g * d, check_finite=False)
        Ld = np.abs(np.diag(factor[0]))
        cond = float((Ld.max() / Ld.min()) ** 2) if Ld.min() > 0 else math.inf
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        step, *_ = np.linalg.lstsq(Hs, -g * d, rcond=None)
        cond = math.inf
    return d * step, cond


@dataclass
class _CenterResult:
    z: np.ndarray
    iterations: int
    flag: str  # centered | budget | stalled | degenerate | stopped
    cond: float
    decrement: float


def _center(comp: _Compiled, z: np.ndarray, t: float, cfg: SolverSettings, budget: int, stop: Callable | None) -> _CenterResult:
    cond = 1.0
    lam2 = math.inf
    for it in range(budget):
        ev = _barrier(comp, z, t, hessian=True)
        if ev is None:
            return _CenterResult(z, it, "degenerate", cond, lam2)
        phi, g, H = ev
        dz, cond = _newton_direction(H, g)
        gd = float(g @ dz)
        if not math.isfinite(gd) or gd >= 0.0:
            flag = "degenerate" if cond > cfg.cond_limit else "stalled"
            return _CenterResult(z, it, flag, cond, lam2)
        lam2 = -gd
        if lam2 / 2.0 <= cfg.newton_tol:
            return _CenterResult(z, it, "centered", cond, lam2)
        lam = math.sqrt(lam2)
        floor = 1.0 / (1.0 + lam) if lam > QUADRATIC_REGION else 0.0

        step = 1.0
        while True:
            z_new = z + step * dz
            trial = _barrier(comp, z_new, t, hessian=False)
            if trial is not None:
                phi_new = trial[0]
                if lam <= QUADRATIC_REGION:
                    break
                if phi_new <= phi + cfg.ls_alpha * step * gd:
                    break
                if step <= floor and phi_new < phi:
                    break
            step *= cfg.ls_beta
            if step < MIN_STEP:
                return _CenterResult(z, it + 1, "stalled", cond, lam2)
        z = z_new
        if stop is not None and stop(z):
            return _CenterResult(z, it + 1, "stopped", cond, lam2)
    return _CenterResult(z, budget, "budget", cond, lam2)


@dataclass
class _PathResult:
    status: str
    z: np.ndarray
    t: float
    newton: int
    stages: list[dict]
    cond: float
    stopped: bool = False


def _path_follow(comp: _Compiled, z: np.ndarray, cfg: SolverSettings, max_newton: int, stop: Callable | None = None, label: str = "fase II") -> _PathResult:
    t = cfg.t0
    total = 0
    stages: list[dict] = []
    prev = None
    cond = 1.0
    status = MAX_ITERATIONS
    while True:
        budget = min(cfg.max_stage_newton, max_newton - total)
        if budget <= 0:
            status = MAX_ITERATIONS
            break
        res = _center(comp, z, t, cfg, budget, stop)
        total += res.iterations
        z, cond = res.z, res.cond
        if res.flag == "stopped":
            return _PathResult(OPTIMAL, z, t, total, stages, cond, stopped=True)
        if res.flag == "degenerate":
            status = DEGENERATE
            logger.warning("%s: sistema de Newton degenerado (cond=%.3g, t=%.3g)", label, cond, t)
            break
        obj = comp.f0(z)
        gap = comp.nu / t
        change = abs(obj - prev) / max(1.0, abs(obj)) if prev is not None else math.inf
        stages.append({"t": t, "objective": obj, "gap": gap, "change": change, "newton": res.iterations, "cond": cond, "flag": res.flag})
        logger.debug("%s: t=%.3g obj=%.12g gap=%.3g newton=%s (%s)", label, t, obj, gap, res.iterations, res.flag)
        if res.flag == "budget" and total >= max_newton:
            status = MAX_ITERATIONS
            break
        if gap <= cfg.gap_tol and change <= cfg.stall_tol:
            status = OPTIMAL
            break
        prev = obj
        t *= cfg.t_factor

    if status != OPTIMAL and stages and stages[-1]["gap"] <= cfg.accept_gap:
        logger.warning("%s: %s, aceitando o último estágio com gap %.3g", label, status, stages[-1]["gap"])
        status = OPTIMAL
    return _PathResult(status, z, t, total, stages, cond)


# ======================================================================
# FASE I
# ======================================================================
def _strictly_feasible(comp: _Compiled, z: np.ndarray) -> bool:
    blocks = comp.blocks + ([comp.objective_block] if comp.objective_block is not None else [])
    for blk in blocks:
        try:
            np.linalg.cholesky(blk.matrix(z))
        except np.linalg.LinAlgError:
            return False
    if comp.b.size and np.any(comp.b + comp.A @ z <= 0.0):
        return False
    return True


def _infeasibility(comp: _Compiled, z: np.ndarray) -> float:
    worst = 0.0
    blocks = comp.blocks + ([comp.objective_block] if comp.objective_block is not None else [])
    for blk in blocks:
        worst = max(worst, -float(np.linalg.eigvalsh(blk.matrix(z)).min()))
    if comp.b.size:
        worst = max(worst, -float((comp.b + comp.A @ z).min()))
    return worst


def _phase_one_model(comp: _Compiled) -> _Compiled:
    """Variável extra sigma: todos os blocos + sigma*I, todas as linhas + sigma, sigma >= -1."""
    n = comp.n
    blocks = []
    sources = comp.blocks + ([comp.objective_block] if comp.objective_block is not None else [])
    for blk in sources:
        G = np.concatenate([blk.G, np.eye(blk.m)[:, :, None]], axis=2)
        blocks.append(_Block(blk.name, blk.C, G, np.append(blk.support, n)))
    A = sp.hstack([comp.A, sp.csr_matrix(np.ones((comp.b.size, 1)))], format="csr")
    floor_row = sp.csr_matrix(([1.0], ([0], [n])), shape=(1, n + 1))
    A = sp.vstack([A, floor_row], format="csr")
    b = np.append(comp.b, 1.0)
    c = np.zeros(n + 1)
    c[n] = 1.0
    return _Compiled(n + 1, c, 0.0, None, blocks, A, b)


def _phase_one(comp: _Compiled, z0: np.ndarray, cfg: SolverSettings) -> tuple[np.ndarray | None, int]:
    aug = _phase_one_model(comp)
    sigma0 = _infeasibility(comp, z0) + 1.0
    start = np.append(z0, sigma0)

    def stop(za: np.ndarray) -> bool:
        return za[-1] < 0.0 and _strictly_feasible(comp, za[:-1])

    res = _path_follow(aug, start, cfg, cfg.phase1_max_newton, stop=stop, label="fase I")
    if res.stopped:
        return res.z[:-1], res.newton
    logger.debug("fase I terminou sem ponto interior (sigma=%.3g, status=%s)", res.z[-1], res.status)
    return None, res.newton


# ======================================================================
# SOLVE
# ======================================================================
def _duals(comp: _Compiled, p: SdpProblem, z: np.ndarray, t: float) -> dict:
    psd = {}
    for blk in comp.blocks:
        psd[blk.name] = np.linalg.inv(blk.matrix(z)) / t
    linear: dict[str, np.ndarray] = {}
    nonneg: dict[str, np.ndarray] = {}
    if comp.b.size:
        y = 1.0 / (t * (comp.b + comp.A @ z))
        shapes = {name: g.shape for name, g in p.inequalities}
        for (kind, name, i), val in zip(comp.row_labels, y):
            if kind == "linear":
                linear.setdefault(name, np.zeros(int(np.prod(shapes[name]))))[i] = val
            else:
                nonneg.setdefault(name, np.zeros(p.variables[name].size))[i] = val
        linear = {k: v.reshape(shapes[k]) for k, v in linear.items()}
    return {"psd": psd, "linear": linear, "nonneg": nonneg}


def _finish(p: SdpProblem, comp: _Compiled | None, status: str, x: np.ndarray, duals: dict, info: dict, started: float) -> SdpSolution:
    info["wall_time"] = time.perf_counter() - started
    sol = SdpSolution(
        status=status,
        objective=p.objective_value(x),
        x=x,
        values=p.unpack(x),
        duals=duals,
        info=info,
        problem=p,
    )
    sol.report = residuals(p, sol)
    return sol


def solve(p: SdpProblem, settings: SolverSettings | None = None, x0: Mapping | None = None, **overrides) -> SdpSolution:
    """
    Método de barreira com seguimento de caminho:
        min  t*(c'x - logdet F(x)) - sum logdet Z_k(x) - sum log s_i(x)
    com t multiplicado por t_factor a cada estágio.
    Não levanta exceção por resultado numérico: o status fica na solução.
    x0 é um ponto inicial opcional (valores por variável); é projetado nas igualdades.
    """
    started = time.perf_counter()
    cfg = settings or SolverSettings.from_settings()
    if overrides:
        cfg = replace(cfg, **overrides)

    comp, reason = compile_problem(p)
    info: dict = {"stages": [], "newton": 0, "phase1_newton": 0, "settings": cfg.to_dict()}
    if comp is None:
        info["reason"] = reason
        x = np.zeros(p.n_params)
        return _finish(p, None, INFEASIBLE, x, {}, info, started)

    info["nu"] = comp.nu
    info["params"] = comp.n
    z = np.zeros(comp.n)
    if x0 is not None:
        z = comp.to_z(p.pack(x0))

    if comp.n == 0:
        status = OPTIMAL if _strictly_feasible(comp, z) else INFEASIBLE
        return _finish(p, comp, status, comp.to_x(z), {}, info, started)

    if not _strictly_feasible(comp, z):
        found, used = _phase_one(comp, z, cfg)
        info["phase1_newton"] += used
        if found is None and np.any(z != 0.0):
            logger.warning("fase I: ponto inicial informado não serviu, recomeçando da origem")
            found, used = _phase_one(comp, np.zeros(comp.n), cfg)
            info["phase1_newton"] += used
        if found is None:
            info["reason"] = "fase I não encontrou ponto estritamente viável"
            return _finish(p, comp, INFEASIBLE, comp.to_x(z), {}, info, started)
        z = found

    res = _path_follow(comp, z, cfg, cfg.max_newton)
    info.update(
        newton=res.newton,
        stages=res.stages,
        gap=comp.nu / res.t,
        t=res.t,
        cond=res.cond,
        stage_objectives=[s["objective"] for s in res.stages],
        last_change=res.stages[-1]["change"] if res.stages else math.inf,
    )
    duals = _duals(comp, p, res.z, res.t)
    return _finish(p, comp, res.status, comp.to_x(res.z), duals, info, started)


def gradient_error(p: SdpProblem, values: Mapping, t: float = 1.0, h: float = 1e-6) -> float:
    """Erro relativo entre o gradiente analítico da barreira e diferenças centrais no ponto dado."""
    comp, reason = compile_problem(p)
    if comp is None:
        raise ModelError(reason)
    z = comp.to_z(p.pack(values))
    out = _barrier(comp, z, t)
    if out is None:
        raise ModelError("ponto fora do domínio da barreira")
    grad = out[1]
    fd = np.zeros_like(grad)
    for i in range(z.size):
        step = np.zeros_like(z)
        step[i] = h
        plus, minus = _barrier(comp, z + step, t, hessian=False), _barrier(comp, z - step, t, hessian=False)
        if plus is None or minus is None:
            raise ModelError("passo de diferença finita sai do domínio")
        fd[i] = (plus[0] - minus[0]) / (2.0 * h)
    return float(np.linalg.norm(grad - fd) / max(float(np.linalg.norm(fd)), 1e-12))
