# elipsoides/selftest.py
"""
Bateria de invariantes rodada por `manage.py selftest`. Os valores numéricos
de referência ficam em golden/selftest.json; --full usa as contagens completas.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from . import dro, reachability
from . import logdet_sdp as lp
from .experiments import ExperimentConfig, StudyResult, chipped_study, random_polytopes_study
from .instances import (
    chipped_cop_closed_form,
    chipped_hypercube,
    chipped_smvie_closed_form,
    random_polytope,
    random_simplex,
    simplex,
    unit_square,
    with_redundant_ellipsoid,
)
from .mve_baselines import (
    CG_EPS,
    MveError,
    mve_of_points,
    run_method,
    solve_exact_constraint_generation,
    solve_smvie,
    solve_sproc,
)
from .mve_copositive import lift_smvie_certificate, solve_polytope_mve, verify_certificate
from .parallel import STREAM_CORRELATION, STREAM_INSTANCE, STREAM_SEEDS, make_rng

logger = logging.getLogger(__name__)

GOLDEN_PATH = Path(__file__).resolve().parent / "golden" / "selftest.json"

QUICK = {"dominance_count": 20, "random_checks": 5, "gradient_count": 5, "inventory_seeds": 2, "reach_T": 4, "chipped_K": (2, 3, 4)}
FULL = {"dominance_count": 150, "random_checks": 25, "gradient_count": 20, "inventory_seeds": 20, "reach_T": 8, "chipped_K": tuple(range(2, 11))}


def load_golden(path: Path | None = None) -> dict:
    with (path or GOLDEN_PATH).open(encoding="utf-8") as fh:
        return json.load(fh)


def measured_values(settings) -> dict[str, float]:
    """Valores comparados com o arquivo golden."""
    values = {
        "simplex_cop_volume": run_method(simplex(2), "cop", settings).ellipsoid.volume,
        "square_exact_volume": run_method(unit_square(), "exact", settings).ellipsoid.volume,
        "square_smvie_volume": run_method(unit_square(), "smvie", settings).ellipsoid.volume,
        "square_cop_volume": run_method(unit_square(), "cop", settings).ellipsoid.volume,
        "chipped2_smvie_radius": run_method(chipped_hypercube(2), "smvie", settings).ellipsoid.radius,
        "reach_t1_radius": reachability.run_example(1, settings)[0].radius,
    }
    for r in (1.0, 2.0, 5.0):
        inst = dro.example2_instance(2, r)
        values[f"example2_r{r:g}"] = dro.solve_pld(inst, *dro.single_cell(inst, settings), settings).objective
    for s in (0.0, 3.0, 6.0):
        inst = dro.example3_instance(3, s)
        values[f"example3_s{s:g}"] = dro.solve_pld(inst, *dro.single_cell(inst, settings), settings).objective
    return values


def compare_golden(values: dict[str, float], golden: dict, result: StudyResult) -> None:
    default_tol = float(golden.get("tolerance", 1e-5))
    for name, entry in golden["values"].items():
        if name not in values:
            result.check(f"golden {name}", False, "valor não medido")
            continue
        expected, tol = float(entry["value"]), float(entry.get("tol", default_tol))
        got = values[name]
        result.rows.append([name, got, expected, abs(got - expected)])
        result.check(f"golden {name}", abs(got - expected) <= tol, f"{got:.10g} vs {expected:.10g}")


def barrier_gradient_errors(count: int, rng: np.random.Generator, K: int = 3) -> list[float]:
    """Gradiente de -logdet X (com o bloco 2M - X) contra diferenças centrais em matrizes PD aleatórias."""
    errors = []
    for _ in range(count):
        G = rng.standard_normal((K, K))
        M = G @ G.T + np.eye(K)
        p = lp.new_problem()
        X = p.add_matrix_variable("X", K)
        p.add_psd_constraint(2.0 * M - X, name="teto")
        p.set_objective(logdet=X)
        errors.append(lp.gradient_error(p, {"X": M}))
    return errors


def _random_polytope_checks(result: StudyResult, count: int, settings, seed: int) -> None:
    """Ponto fixo da S-procedure, dualidade do SMVIE, certificados do cop e exatidão em simplexes."""
    rng = make_rng(seed, STREAM_INSTANCE)
    fixed, gaps, certs = [], [], True
    for i in range(count):
        K = 2 + i % 3
        P = random_polytope(K, K, rng)
        try:
            E_s, _, dual = solve_smvie(P, settings)
        except MveError as e:
            logger.warning("selftest: %s", e)
            gaps.append(np.inf)
            E_s, _, _ = solve_smvie(P, settings, with_dual=False)
        else:
            gaps.append(dual.gap)
        E_p = solve_sproc(with_redundant_ellipsoid(P, E_s), settings)
        fixed.append(float(np.linalg.norm(E_p.A - E_s.A) + np.linalg.norm(E_p.b - E_s.b)))
        E_c, cert = solve_polytope_mve(P, settings)
        certs = certs and verify_certificate(P, E_c, cert).passed
    result.check(f"S-procedure: ponto fixo em {count} politopos", max(fixed, default=0.0) <= 1e-4, f"maior desvio {max(fixed, default=0.0):.3g}")
    result.check(f"SMVIE: primal = dual em {count} politopos", max(gaps, default=0.0) <= 1e-5, f"maior gap {max(gaps, default=0.0):.3g}")
    result.check(f"certificados do cop em {count} politopos", certs)

    for K in (2, 3, 4):
        S = random_simplex(K, rng)
        exact = run_method(S, "exact", settings).ellipsoid.volume
        for method in ("cop", "smvie"):
            got = run_method(S, method, settings).ellipsoid.volume
            result.check(f"simplex K={K}: {method} = exato", abs(got - exact) <= 1e-3 * exact, f"{got:.8g} vs {exact:.8g}")
        P = random_polytope(K, K, rng)
        cg = solve_exact_constraint_generation(P).volume
        pts = mve_of_points(P.vertices, eps=CG_EPS).volume
        result.check(f"K={K}: geração de restrições = MVE dos vértices", abs(cg - pts) <= 1e-5 * pts, f"{cg:.10g} vs {pts:.10g}")


def run_selftest(cfg: ExperimentConfig, full: bool = False, golden_path: Path | None = None) -> StudyResult:
    counts = FULL if full else QUICK
    settings = cfg.solver_settings
    result = StudyResult(header=["valor", "medido", "esperado", "erro"])

    compare_golden(measured_values(settings), load_golden(golden_path), result)

    # certificados
    P = chipped_hypercube(4)
    E_cf, cert = chipped_cop_closed_form(4)
    result.check("certificado fechado do chanfrado K=4", verify_certificate(P, E_cf, cert).passed)
    E, cert = solve_polytope_mve(simplex(3), settings)
    result.check("certificado do simplex K=3", verify_certificate(simplex(3), E, cert).passed)
    P2 = chipped_hypercube(2)
    _, _, Lam, rho = chipped_smvie_closed_form(2)
    E_lift, cert_lift = lift_smvie_certificate(P2, Lam, rho)
    E_smvie = run_method(P2, "smvie", settings).ellipsoid
    result.check(
        "levantamento do dual do SMVIE",
        verify_certificate(P2, E_lift, cert_lift).passed and E_lift.volume <= E_smvie.volume * (1 + 1e-6),
    )
    square = unit_square()
    E_s = run_method(square, "smvie", settings).ellipsoid
    E_p, mu, lam = solve_sproc(with_redundant_ellipsoid(square, E_s), settings, return_multipliers=True)
    drift = float(np.linalg.norm(E_p.A - E_s.A) + np.linalg.norm(E_p.b - E_s.b))
    result.check(
        "S-procedure com a linha do SMVIE: ponto fixo",
        drift <= 1e-4 and float(np.abs(mu).max(initial=0.0)) <= 1e-4 and abs(float(lam[0]) - 1.0) <= 1e-4,
        f"desvio {drift:.3g}",
    )

    # dominância cop <= smvie
    dom_cfg = ExperimentConfig(subcommand="selftest", seed=cfg.seed, count=counts["dominance_count"], K=3, M=3, methods=("cop", "smvie"), tol=cfg.tol, workers=cfg.workers)
    dom = random_polytopes_study(dom_cfg, relative_to="cop")
    result.checks += dom.checks

    _random_polytope_checks(result, counts["random_checks"], settings, cfg.seed)
    grad = barrier_gradient_errors(counts["gradient_count"], make_rng(cfg.seed, STREAM_CORRELATION))
    result.check(f"gradiente da barreira em {len(grad)} matrizes PD", max(grad) <= 1e-5, f"maior erro relativo {max(grad):.3g}")

    chip = chipped_study(counts["chipped_K"], ExperimentConfig(subcommand="selftest", seed=cfg.seed, tol=cfg.tol))
    result.checks += chip.checks

    # DRO: aninhamento e viabilidade amostrada
    for i in range(counts["inventory_seeds"]):
        seed = cfg.seed + i
        inst = dro.generate_inventory_instance(dro.DESK_N, seed)
        parts, ells = dro.build_partitions(inst.support, dro.sample_seeds(inst.support, dro.DESK_J, make_rng(seed, STREAM_SEEDS)), cfg.workers, settings)
        pwl = dro.solve_pld(inst, parts, ells, settings)
        pws = dro.solve_ablation(inst, parts, ells, "pws", settings)
        result.check(f"estoque seed={seed}: pws >= pwl", pws.objective >= pwl.objective - 1e-7)
        worst = dro.check_policy(inst, pwl, samples=1000, rng=make_rng(seed, STREAM_SEEDS))
        result.check(f"estoque seed={seed}: viabilidade amostrada", worst <= dro.CHECK_TOL, f"violação {worst:.3g}")

    # alcançabilidade
    sys = reachability.example_system()
    ellipsoids = reachability.reach_sequence(sys, counts["reach_T"], settings)
    worst = reachability.containment_worst(sys, ellipsoids, 1000, make_rng(cfg.seed))
    result.check(f"alcançável T={counts['reach_T']}: contenção amostrada", worst <= 1.0 + reachability.CONTAIN_TOL, f"nível {worst:.8g}")
    E2, Xl, cert = reachability.propagate_with_certificate(sys, ellipsoids[0], settings)
    result.check("certificado de propagação", verify_certificate(Xl, E2, cert).passed)
    result.check("(1, 0.4) alcançável em T=1", reachability.reach_membership_exact(sys, [1.0, 0.4], 1, settings))

    failed = [name for name, ok, _ in result.checks if not ok]
    result.summary += [("checagens", len(result.checks)), ("falhas", len(failed))]
    if failed:
        logger.warning("selftest: %s falhas (%s)", len(failed), ", ".join(failed))
    return result
