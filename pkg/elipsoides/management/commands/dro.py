# elipsoides/management/commands/dro.py
from django.core.management.base import CommandError

from elipsoides import dro
from elipsoides.experiments import dro_examples_study, inventory_table

from ._base import StudyCommand


class Command(StudyCommand):
    help = "Regras PLD: exemplos com forma fechada (examples) ou a tabela do estoque (inventory)."

    subcommand = "dro"

    def add_arguments(self, parser):
        parser.add_argument("which", choices=("examples", "inventory"))
        super().add_arguments(parser)
        parser.add_argument("--N", type=int, dest="N", help=f"Produtos (padrão {dro.DESK_N})")
        parser.add_argument("--J", type=int, dest="J", help=f"Células da partição (padrão {dro.DESK_J})")
        parser.add_argument("--count", type=int, default=20, help="Seeds do estoque")
        parser.add_argument("--full", action="store_true", help=f"Escala cheia: N={dro.FULL_SCALE_N}, J={dro.FULL_SCALE_J}")

    def handle(self, *args, **options):
        if options["full"]:
            options["N"], options["J"] = dro.FULL_SCALE_N, dro.FULL_SCALE_J
            self.stdout.write(self.style.WARNING("⏳ Escala cheia: cada instância pode levar muitos minutos."))
        self.subcommand = f"dro {options['which']}"
        self.csv_name = f"dro_{options['which']}.csv"
        super().handle(*args, **options)

    def run_study(self, cfg, options):
        if options["which"] == "examples":
            return dro_examples_study(cfg)
        if cfg.N < 1 or cfg.J < 1:
            raise CommandError("N e J precisam ser >= 1")
        return inventory_table(cfg)
