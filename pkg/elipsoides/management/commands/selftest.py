# elipsoides/management/commands/selftest.py
from pathlib import Path

from elipsoides.selftest import run_selftest

from ._base import StudyCommand


class Command(StudyCommand):
    help = "Bateria de invariantes e comparação com o arquivo golden; sai com erro se algo falhar."

    subcommand = "selftest"
    csv_name = "selftest.csv"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--full", action="store_true", help="Contagens completas (150 politopos, 20 seeds)")
        parser.add_argument("--golden", type=str, help="Arquivo golden alternativo")

    def run_study(self, cfg, options):
        golden = Path(options["golden"]) if options.get("golden") else None
        return run_selftest(cfg, full=options["full"], golden_path=golden)
