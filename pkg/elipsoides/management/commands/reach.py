# elipsoides/management/commands/reach.py
from elipsoides.experiments import reach_study

from ._base import StudyCommand


class Command(StudyCommand):
    help = "Elipsoides externos do conjunto alcançável do exemplo 2x2 (CSV das fronteiras e JSON por t)."

    subcommand = "reach"
    csv_name = "reach.csv"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--T", type=int, dest="T", default=8, help="Horizonte")
        parser.add_argument("--samples", type=int, default=1000, help="Amostras por t na checagem de contenção")
        parser.add_argument("--points", type=int, default=256, help="Pontos por curva de fronteira")

    def run_study(self, cfg, options):
        return reach_study(cfg, samples=options["samples"], boundary_points=options["points"])
