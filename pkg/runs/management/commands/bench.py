"""
Micro-benchmark d'une opération : débit, messages et rondes.

Exemple ::

    python manage.py bench mul --size 100000 --latency lan
"""

from typing import Any

from django.core.management.base import CommandParser

from runs.bench import OPERATIONS, run_bench
from runs.cli import EngineCommand, RunReport, usage_error
from runs.models import RunRecord
from sharing.engine import Engine


class Command(EngineCommand):
    help = "Mesure le coût d'une opération de base"
    command = RunRecord.Command.BENCH

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("op", help=", ".join(OPERATIONS))
        parser.add_argument(
            "--size", type=int, default=10_000, help="Nombre d'opérations"
        )
        super().add_arguments(parser)

    def target(self, options: dict[str, Any]) -> str:
        return f"{options['op']}×{options['size']}"

    def check_options(self, options: dict[str, Any]) -> None:
        if options["op"] not in OPERATIONS:
            raise usage_error(
                f"Opération inconnue : {options['op']} ({', '.join(OPERATIONS)})"
            )
        if options["size"] < 1:
            raise usage_error("--size doit être au moins 1")

    def execute_run(
        self, engine: Engine, config: dict[str, Any], options: dict[str, Any]
    ) -> RunReport:
        result = run_bench(engine, options["op"], options["size"])
        return RunReport(self.target(options), result.stats, result.summary())
