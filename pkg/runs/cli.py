"""
Socle commun des commandes ``run``, ``bench`` et ``demo``.

Chaque commande valide ses drapeaux avec ``RunConfigForm``, construit un
engine, mesure le trafic de la partie qui l'intéresse et écrit les
statistiques au format ``{parties, total_rounds, simulated_ms, wall_ms}``.

Codes de sortie : 0 en cas de succès, 1 pour une erreur du moteur, 2 pour
une erreur d'usage ou d'entrée/sortie.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import structlog
from django.core.management.base import BaseCommand, CommandError, CommandParser
from django.db import DatabaseError

from config.defaults import engine_defaults
from netsim.stats import NetStats
from optimizer.exceptions import ProgramSyntaxError
from ring.exceptions import EngineError
from sharing.engine import Engine
from sharing.parties import SERVERS
from tensor.exceptions import TensorIOError

from .forms import RunConfigForm
from .models import RunRecord

logger = structlog.get_logger(__name__)

ENGINE_ERROR = 1
USAGE_ERROR = 2


def usage_error(message: str) -> CommandError:
    return CommandError(message, returncode=USAGE_ERROR)


@dataclass
class RunReport:
    """Résultat d'une commande : trafic mesuré et résumé affiché."""

    target: str
    stats: NetStats
    summary: dict[str, Any] = field(default_factory=dict)


def stats_payload(stats: NetStats) -> dict[str, Any]:
    return stats.to_json(SERVERS)


def write_json(path: Path, payload: dict[str, Any]) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise usage_error(f"Écriture impossible : {path}") from exc


class EngineCommand(BaseCommand):
    """Commande qui exécute un calcul sur un engine configuré par drapeaux."""

    command: RunRecord.Command

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("--n", type=int, help="Bits de l'anneau")
        parser.add_argument("--d", type=int, help="Bits fractionnaires")
        parser.add_argument("--seed", type=int, help="Graine des PRF")
        parser.add_argument("--latency", help="none, lan ou wan")
        parser.add_argument(
            "--no-optimize", action="store_true", help="Désactive les passes"
        )
        parser.add_argument("--stats", type=Path, help="Fichier JSON des stats")
        parser.add_argument(
            "--ppa", action="store_true", help="Extraction de bit logarithmique"
        )
        parser.add_argument(
            "--half-sharing", action="store_true", help="Demi-partage des retenues"
        )
        parser.add_argument(
            "--actor", action="store_true", help="Un acteur par serveur"
        )
        parser.add_argument(
            "--wall-clock",
            action="store_true",
            help="Ajoute le temps réel aux statistiques",
        )

    def execute_run(
        self, engine: Engine, config: dict[str, Any], options: dict[str, Any]
    ) -> RunReport:
        raise NotImplementedError

    def target(self, options: dict[str, Any]) -> str:
        """Ce que la commande exécute (programme, opération, démo)."""
        return ""

    def check_options(self, options: dict[str, Any]) -> None:
        """Validation propre à la commande, avant toute construction d'engine."""

    def handle(self, *args: Any, **options: Any) -> None:
        self.check_options(options)
        form = RunConfigForm.from_options(options, engine_defaults())
        if not form.is_valid():
            raise usage_error(form.error_text())
        config = form.summary()
        engine = form.build_engine()
        started = time.perf_counter()
        try:
            report = self.execute_run(engine, config, options)
        except (ProgramSyntaxError, TensorIOError) as exc:
            raise usage_error(str(exc)) from exc
        except (EngineError, OverflowError) as exc:
            self.record(
                self.target(options),
                config,
                NetStats(),
                {},
                RunRecord.Status.ENGINE_ERROR,
                exc,
            )
            logger.info(
                "runs.failed", command=str(self.command), error=type(exc).__name__
            )
            raise CommandError(
                f"{type(exc).__name__} : {exc}", returncode=ENGINE_ERROR
            ) from exc
        wall_ms = (time.perf_counter() - started) * 1000.0
        stats = report.stats.with_wall_ms(wall_ms if config["wall_clock"] else None)
        payload = stats_payload(stats)
        if options.get("stats") is not None:
            write_json(options["stats"], payload)
        self.record(
            report.target,
            config,
            stats,
            report.summary,
            RunRecord.Status.SUCCESS,
        )
        logger.info(
            "runs.completed",
            command=str(self.command),
            target=report.target,
            rounds=stats.total_rounds,
        )
        self.stdout.write(json.dumps(report.summary | {"stats": payload}, indent=2))

    def record(
        self,
        target: str,
        config: dict[str, Any],
        stats: NetStats,
        summary: dict[str, Any],
        status: RunRecord.Status,
        error: BaseException | None = None,
    ) -> None:
        """Enregistre l'exécution ; ignoré si la base n'est pas disponible."""
        try:
            RunRecord.objects.create(
                command=self.command,
                target=target[:255],
                status=status,
                config=config,
                stats=stats_payload(stats),
                summary=summary,
                error="" if error is None else str(error),
            )
        except DatabaseError as exc:
            logger.debug("runs.record_skipped", reason=str(exc))
