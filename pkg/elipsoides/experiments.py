# elipsoides/experiments.py
"""
Estudos reproduzíveis em escala de mesa: politopos aleatórios, hipercubo
chanfrado, exemplos e estoque de DRO, e conjuntos alcançáveis. Cada estudo
devolve um StudyResult (linhas para CSV, resumo para o terminal e checagens).
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import dro, reachability
from .conf import experiment_setting
from .geometry import GeometryError
from .instances import (
    chipped_cop_closed_form,
    chipped_cop_radius_bound,
    chipped_hypercube,
    chipped_smvie_closed_form,
    chipped_smvie_radius,
    random_polytope,
)
from .logdet_sdp import SdpError, SolverSettings
from .mve_baselines import run_method
from .mve_copositive import MveError, check_smvie_dual, verify_certificate
from .parallel import STREAM_INSTANCE, make_rng, parallel_map, rng_label

logger = logging.getLogger(__name__)

__all__ = [
    "ExperimentConfig",
    "StudyResult",
    "chipped_study",
    "dro_examples_study",
    "fmt",
    "inventory_table",
    "make_rng",
    "parallel_map",
    "random_polytopes_study",
    "reach_study",
    "summarize",
    "write_csv",
]

RANDOM_METHODS = ("exact", "cop", "ktt", "smvie")
EXACT_MAX_K = 5
DOMINANCE_TOL = 1e-6
CLOSED_FORM_RTOL = 1e-4
EXAMPLE_R = (1.0, 1.5, 2.0, 5.0)
EXAMPLE_S = (0.0, 1.0, 2.0, 3.0, 4.0, 6.0)


# ======================================================================
# CONFIGURAÇÃO E SAÍDA
# ======================================================================
@dataclass
class ExperimentConfig:
    """Uma invocação: a semente determina todas as instâncias."""

    subcommand: str
    seed: int = 2024
    count: int = 10
    K: int = 2
    M: int = 2
    N: int = dro.DESK_N
    J: int = dro.DESK_J
    T: int = 4
    methods: tuple[str, ...] = RANDOM_METHODS
    tol: float | None = None
    out: Path | None = None
    workers: int = 1

    @classmethod
    def from_options(cls, subcommand: str, **options) -> "ExperimentConfig":
        """Defaults de settings.ELIPSOIDES sobrescritos pelas flags (valores None são ignorados)."""
        base = {
            "seed": int(experiment_setting("SEED")),
            "workers": int(experiment_setting("WORKERS")),
        }
        known = {f for f in cls.__dataclass_fields__ if f != "subcommand"}
        base.update({k: v for k, v in options.items() if k in known and v is not None})
        if isinstance(base.get("methods"), str):
            base["methods"] = tuple(m.strip() for m in base["methods"].split(",") if m.strip())
        if base.get("out") is not None:
            base["out"] = Path(base["out"])
        return cls(subcommand=subcommand, **base)

    @property
    def solver_settings(self) -> SolverSettings:
        return SolverSettings.from_settings().with_tol(self.tol)

    def output_path(self, name: str) -> Path:
        if self.out is not None:
            return self.out
        return Path(experiment_setting("OUTPUT_DIR")) / name

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "seed": self.seed,
            "count": self.count,
            "K": self.K,
            "M": self.M,
            "N": self.N,
            "J": self.J,
            "T": self.T,
            "methods": list(self.methods),
            "tol": self.tol,
            "workers": self.workers,
        }


@dataclass
class StudyResult:
    header: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    summary: list[tuple[str, Any]] = field(default_factory=list)
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    documents: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))
        if not ok:
            logger.warning("checagem falhou: %s (%s)", name, detail)


def fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), f".{int(experiment_setting('CSV_DIGITS'))}g")
    return str(value)


def write_csv(path: Path | str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
    """Vírgula, cabeçalho, UTF-8; uma linha de comentário com o gerador aleatório."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"# gerador: {rng_label()}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    logger.info("csv gravado: %s (%s linhas)", path, len(rows))
    return path


def summarize(values: Sequence[float]) -> dict:
    arr = np.asarray([v for v in values if v is not None and not math.isnan(v)], dtype=float)
    if arr.size == 0:
        return {"mean": math.nan, "p10": math.nan, "p90": math.nan}
    return {"mean": float(arr.mean()), "p10": float(np.percentile(arr, 10)), "p90": float(np.percentile(arr, 90))}


# ======================================================================
# POLITOPOS ALEATÓRIOS
# ======================================================================
def _radii(P, methods: Sequence[str], settings: SolverSettings) -> dict:
    out = {}
    for method in methods:
        if method == "exact" and P.K > EXACT_MAX_K:
            out[method] = math.nan
            continue
        try:
            out[method] = run_method(P, method, settings).ellipsoid.radius
        except (MveError, GeometryError, SdpError, ArithmeticError) as e:
            logger.warning("método %s falhou: %s", method, e)
            out[method] = math.nan
    return out


def random_polytopes_study(cfg: ExperimentConfig, relative_to: str = "exact") -> StudyResult:
    """Raios por instância e subotimalidade R_m / R_ref - 1 (média, p10, p90)."""
    if relative_to not in ("exact", "cop"):
        raise ValueError(f"referência inválida: {relative_to}")
    methods = [m for m in RANDOM_METHODS if m in cfg.methods or m == relative_to]
    if relative_to == "cop":
        methods = [m for m in methods if m != "exact"]
    rng = make_rng(cfg.seed, STREAM_INSTANCE)
    polys = [random_polytope(cfg.K, cfg.M, rng) for _ in range(cfg.count)]
    settings = cfg.solver_settings
    radii = parallel_map(lambda P: _radii(P, methods, settings), polys, cfg.workers)

    result = StudyResult(header=["seed", "instancia", "K", "M"] + [f"R_{m}" for m in methods])
    for i, r in enumerate(radii):
        result.rows.append([cfg.seed, i, cfg.K, cfg.M] + [r[m] for m in methods])

    compared = [m for m in methods if m != relative_to]
    for m in compared:
        stats = summarize([r[m] / r[relative_to] - 1.0 for r in radii])
        result.summary += [(f"{m} vs {relative_to} média", stats["mean"]), (f"{m} p10", stats["p10"]), (f"{m} p90", stats["p90"])]
    if "cop" in methods and "smvie" in methods:
        worst = max((r["cop"] - r["smvie"] for r in radii), default=0.0)
        result.check("cop <= smvie (raio)", worst <= DOMINANCE_TOL, f"maior excesso {worst:.3g}")
    return result


# ======================================================================
# HIPERCUBO CHANFRADO
# ======================================================================
def chipped_study(K_values: Sequence[int], cfg: ExperimentConfig) -> StudyResult:
    settings = cfg.solver_settings
    result = StudyResult(
        header=["seed", "K", "R_exact", "R_cop", "R_smvie", "R_smvie_forma_fechada", "R_cop_limite", "razao_smvie_cop", "closed_form_ok"]
    )
    ratios = []
    for K in K_values:
        P = chipped_hypercube(K)
        r = _radii(P, ["exact", "cop", "smvie"] if K <= EXACT_MAX_K else ["cop", "smvie"], settings)
        bound = chipped_cop_radius_bound(K)
        closed = chipped_smvie_radius(K)
        E_cf, cert_cf = chipped_cop_closed_form(K)
        ok = verify_certificate(P, E_cf, cert_cf).passed
        B, d, Lam, rho = chipped_smvie_closed_form(K)
        try:
            check_smvie_dual(P, Lam, rho)
        except MveError:
            ok = False
        ratio = r["smvie"] / r["cop"]
        ratios.append(ratio)
        result.rows.append([cfg.seed, K, r.get("exact", math.nan), r["cop"], r["smvie"], closed, bound, ratio, ok])
        result.check(f"K={K}: R_cop <= limite", r["cop"] <= bound + 1e-6, f"{r['cop']:.8g} vs {bound:.8g}")
        result.check(f"K={K}: R_smvie = forma fechada", abs(r["smvie"] - closed) <= CLOSED_FORM_RTOL * closed, f"{r['smvie']:.8g} vs {closed:.8g}")
        result.check(f"K={K}: certificados em forma fechada", ok)
    tail = [ratios[i] for i, K in enumerate(K_values) if K >= 3]
    if len(tail) > 1:
        result.check("razão crescente a partir de K=3", all(b > a for a, b in zip(tail, tail[1:])))
    return result


# ======================================================================
# DRO
# ======================================================================
def dro_examples_study(cfg: ExperimentConfig, r_values: Sequence[float] = EXAMPLE_R, s_values: Sequence[float] = EXAMPLE_S) -> StudyResult:
    settings = cfg.solver_settings
    result = StudyResult(header=["seed", "exemplo", "parametro", "z", "z_forma_fechada", "erro"])
    for r in r_values:
        inst = dro.example2_instance(2, r)
        parts, ells = dro.single_cell(inst, settings)
        z = dro.solve_pld(inst, parts, ells, settings).objective
        err = abs(z - dro.z_example2(r))
        result.rows.append([cfg.seed, "example2", r, z, dro.z_example2(r), err])
        result.check(f"z(r={r:g})", err <= 1e-5, f"{z:.8g}")
    for s in s_values:
        inst = dro.example3_instance(3, s)
        parts, ells = dro.single_cell(inst, settings)
        z = dro.solve_pld(inst, parts, ells, settings).objective
        err = abs(z - dro.z_example3(s))
        result.rows.append([cfg.seed, "example3", s, z, dro.z_example3(s), err])
        result.check(f"z(s={s:g})", err <= 1e-4, f"{z:.8g}")
    return result


def inventory_table(cfg: ExperimentConfig) -> StudyResult:
    """Um seed por instância (cfg.seed, cfg.seed + 1, ...); gaps relativos ao pwl."""
    settings = cfg.solver_settings
    seeds = [cfg.seed + i for i in range(cfg.count)]
    outs = parallel_map(lambda s: dro.inventory_study(cfg.N, cfg.J, s, 1, settings), seeds, cfg.workers)
    result = StudyResult(header=["seed", "N", "J", "pwl", "pws", "ldr", "pwl2", "gap_pws", "gap_ldr", "gap_pwl2"])
    for o in outs:
        result.rows.append([o[k] for k in result.header])
    for mode in ("pws", "ldr", "pwl2"):
        stats = summarize([o[f"gap_{mode}"] for o in outs])
        result.summary += [(f"{mode} média", stats["mean"]), (f"{mode} p10", stats["p10"]), (f"{mode} p90", stats["p90"])]
    result.check("pws >= pwl em toda instância", all(o["pws"] >= o["pwl"] - 1e-7 for o in outs))
    result.check("gap médio pws > 0", summarize([o["gap_pws"] for o in outs])["mean"] > 0.0)
    return result


# ======================================================================
# ALCANÇABILIDADE
# ======================================================================
def reach_study(cfg: ExperimentConfig, samples: int = 1000, boundary_points: int = 256) -> StudyResult:
    sys = reachability.example_system()
    ellipsoids = reachability.reach_sequence(sys, cfg.T, cfg.solver_settings)
    result = StudyResult(header=["seed", "t", "curva", "indice", "x", "y"])
    for t, E in enumerate(ellipsoids, start=1):
        for kind, pts in (("elipsoide", E.boundary(boundary_points)), ("alcancavel", reachability.reachable_boundary(sys, t, boundary_points))):
            for i, (x, y) in enumerate(pts):
                result.rows.append([cfg.seed, t, kind, i, x, y])
        result.summary.append((f"t={t} raio", E.radius))
    worst = reachability.containment_worst(sys, ellipsoids, samples, make_rng(cfg.seed, STREAM_INSTANCE))
    result.check("amostras alcançáveis dentro de E_t", worst <= 1.0 + reachability.CONTAIN_TOL, f"nível máximo {worst:.8g}")
    volumes = [E.volume for E in ellipsoids]
    result.check("volumes não decrescentes", all(b >= a * (1 - 1e-6) for a, b in zip(volumes, volumes[1:])))
    result.documents["ellipsoids"] = [{"t": t, **E.to_dict(), "volume": E.volume, "radius": E.radius} for t, E in enumerate(ellipsoids, start=1)]
    return result
