# elipsoides/management/commands/random_polytopes.py
from elipsoides.experiments import RANDOM_METHODS, random_polytopes_study

from ._base import StudyCommand

DESK_MAX_K = 6
DESK_MAX_COUNT = 50


class Command(StudyCommand):
    help = "Compara os raios de exact/cop/ktt/smvie em politopos aleatórios (média, p10 e p90 da subotimalidade)."

    subcommand = "random-polytopes"
    csv_name = "random_polytopes.csv"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--K", type=int, dest="K", default=2, help="Dimensão")
        parser.add_argument("--M", type=int, dest="M", default=2, help="Cortes aleatórios sobre a caixa [0,1]^K")
        parser.add_argument("--count", type=int, default=50, help="Número de instâncias")
        parser.add_argument("--method", type=str, dest="methods", default=",".join(RANDOM_METHODS), help="Lista separada por vírgula")
        parser.add_argument(
            "--relative-to",
            choices=("exact", "cop"),
            default="exact",
            dest="relative_to",
            help="Referência da subotimalidade (cop omite a coluna exact)",
        )

    def run_study(self, cfg, options):
        if cfg.K > DESK_MAX_K or cfg.M > 3 * cfg.K or cfg.count > DESK_MAX_COUNT:
            self.stdout.write(self.style.WARNING(f"⚠️ Acima da escala de mesa (K <= {DESK_MAX_K}, M <= 3K, count <= {DESK_MAX_COUNT})."))
        return random_polytopes_study(cfg, relative_to=options["relative_to"])
