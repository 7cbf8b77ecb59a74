# elipsoides/management/commands/_base.py
from __future__ import annotations

import json
import logging
import time

from django.core.management.base import BaseCommand, CommandError

from elipsoides.dro import DroError
from elipsoides.experiments import ExperimentConfig, StudyResult, fmt, write_csv
from elipsoides.geometry import GeometryError
from elipsoides.logdet_sdp import SdpError
from elipsoides.mve_copositive import MveError
from elipsoides.reachability import ReachabilityError

logger = logging.getLogger("elipsoides.commands")

DOMAIN_ERRORS = (GeometryError, SdpError, MveError, DroError, ReachabilityError)


def add_common_arguments(parser) -> None:
    parser.add_argument("--seed", type=int, help="Semente do gerador (padrão: ELIPSOIDES['SEED'])")
    parser.add_argument("--tol", type=float, help="Tolerância do resolvedor (viabilidade e gap)")
    parser.add_argument("--out", type=str, help="Arquivo de saída (padrão: ELIPSOIDES['OUTPUT_DIR']/<nome>)")
    parser.add_argument("--parallel", type=int, dest="workers", help="Número de workers do map paralelo")


class StudyCommand(BaseCommand):
    """Comando que roda um estudo, grava o CSV e sai com erro se alguma checagem falhar."""

    subcommand = ""
    csv_name = ""

    def add_arguments(self, parser):
        add_common_arguments(parser)

    def run_study(self, cfg: ExperimentConfig, options: dict) -> StudyResult:
        raise NotImplementedError

    def handle(self, *args, **options):
        cfg = ExperimentConfig.from_options(self.subcommand, **options)
        logger.info("%s: %s", self.subcommand, cfg.to_dict())
        started = time.perf_counter()
        try:
            result = self.run_study(cfg, options)
        except DOMAIN_ERRORS as e:
            raise CommandError(f"{self.subcommand}: {e}") from e
        elapsed = time.perf_counter() - started

        if result.rows:
            path = write_csv(cfg.output_path(self.csv_name), result.header, result.rows)
            self.stdout.write(f"CSV: {path}")
            if result.documents:
                doc_path = path.with_suffix(".json")
                doc_path.write_text(json.dumps(result.documents, indent=2), encoding="utf-8")
                self.stdout.write(f"JSON: {doc_path}")
        self.report(result, elapsed)
        if not result.passed:
            failed = sum(1 for _, ok, _ in result.checks if not ok)
            raise CommandError(f"{self.subcommand}: {failed} checagem(ns) falharam")

    # ------------------------------------------------------------------
    def report(self, result: StudyResult, elapsed: float) -> None:
        for name, value in result.summary:
            self.stdout.write(f"  {name}: {fmt(value)}")
        for name, ok, detail in result.checks:
            line = f"  [{'ok' if ok else 'FALHOU'}] {name}" + (f" ({detail})" if detail else "")
            self.stdout.write(self.style.SUCCESS(line) if ok else self.style.ERROR(line))
        self.stdout.write(self.style.NOTICE(f"tempo total: {elapsed:.2f}s"))
