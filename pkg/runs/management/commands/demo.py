"""
Démonstrations : régression logistique (``lr``) ou réseau à deux couches (``nn``).

Exemple ::

    python manage.py demo nn --seed 1 --stats nn-stats.json
"""

from typing import Any

from django.core.management.base import CommandParser

from runs.cli import EngineCommand, RunReport, usage_error
from runs.demos import DEMOS
from runs.models import RunRecord
from sharing.engine import Engine


class Command(EngineCommand):
    help = "Lance une démonstration sur des données synthétiques"
    command = RunRecord.Command.DEMO

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("name", help=" ou ".join(DEMOS))
        super().add_arguments(parser)

    def target(self, options: dict[str, Any]) -> str:
        return str(options["name"])

    def check_options(self, options: dict[str, Any]) -> None:
        if options["name"] not in DEMOS:
            raise usage_error(f"Démonstration inconnue : {options['name']}")

    def execute_run(
        self, engine: Engine, config: dict[str, Any], options: dict[str, Any]
    ) -> RunReport:
        report = DEMOS[options["name"]](engine)
        return RunReport(report.name, report.stats, report.metrics)
