# elipsoides/management/commands/chipped.py
from django.core.management.base import CommandError

from elipsoides.experiments import chipped_study

from ._base import StudyCommand


class Command(StudyCommand):
    help = "Raios do hipercubo chanfrado por método, com as formas fechadas e o limite do cop."

    subcommand = "chipped"
    csv_name = "chipped.csv"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--k-min", type=int, default=2)
        parser.add_argument("--k-max", type=int, default=10)

    def run_study(self, cfg, options):
        if options["k_min"] < 2 or options["k_max"] < options["k_min"]:
            raise CommandError("intervalo de K inválido")
        return chipped_study(range(options["k_min"], options["k_max"] + 1), cfg)
