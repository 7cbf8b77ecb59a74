# elipsoides/management/commands/mve.py
import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from elipsoides.logdet_sdp import SolverSettings
from elipsoides.mve_baselines import METHODS, run_method
from elipsoides.serializers import MveRequestSerializer, MveResultSerializer

from ._base import DOMAIN_ERRORS

logger = logging.getLogger("elipsoides.commands")


class Command(BaseCommand):
    help = "Resolve o MVE de um politopo/QuadSet lido de um arquivo JSON e imprime o resultado em JSON."

    def add_arguments(self, parser):
        parser.add_argument("input", type=str, help='Arquivo JSON: {"S", "t"[, "quads"]} ou {"set": ...}')
        parser.add_argument("--method", choices=METHODS, default="cop")
        parser.add_argument("--tol", type=float)
        parser.add_argument("--out", type=str, help="Grava o JSON neste arquivo em vez do stdout")

    def handle(self, *args, **options):
        path = Path(options["input"])
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise CommandError(f"não consegui ler {path}: {e}") from e
        if not isinstance(payload, dict):
            raise CommandError(f"{path}: esperava um objeto JSON")

        ser = MveRequestSerializer(data={
            "set": payload.get("set", payload),
            "method": options["method"],
            "tol": options.get("tol"),
        })
        if not ser.is_valid():
            raise CommandError(f"entrada inválida: {json.dumps(ser.errors, ensure_ascii=False)}")
        data = ser.validated_data

        settings = SolverSettings.from_settings().with_tol(data.get("tol"))
        try:
            result = run_method(data["set"], data["method"], settings)
        except DOMAIN_ERRORS as e:
            raise CommandError(f"mve: {e}") from e
        logger.info("mve %s: volume %.6g em %.2fs", result.method, result.ellipsoid.volume, result.wall_time)

        text = json.dumps(MveResultSerializer(result).data, indent=2)
        if options.get("out"):
            Path(options["out"]).write_text(text, encoding="utf-8")
            self.stdout.write(self.style.SUCCESS(f"✅ {result.method}: volume {result.ellipsoid.volume:.10g} -> {options['out']}"))
        else:
            self.stdout.write(text)
