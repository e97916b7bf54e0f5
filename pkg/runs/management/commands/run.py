"""
Exécute un programme : partage des entrées, calcul, révélation.

Exemple ::

    python manage.py run prog.qmp --input x=x.csv --input y=y.csv \
        --output-dir out/ --stats out/stats.json
"""

from pathlib import Path
from typing import Any

from django.core.management.base import CommandParser

from optimizer.analysis import check_reject
from optimizer.interpreter import Interpreter
from optimizer.passes import optimize
from optimizer.sexpr import parse_literal, read_program
from runs.cli import EngineCommand, RunReport, usage_error
from runs.models import RunRecord
from sharing.engine import Engine
from tensor.io import load_values, save_values


def parse_assignments(items: list[str] | None, flag: str) -> dict[str, str]:
    """``["x=a.csv", ...]`` → ``{"x": "a.csv", ...}``."""
    pairs: dict[str, str] = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or not name or not value:
            raise usage_error(f"{flag} attend nom=valeur (reçu {item!r})")
        pairs[name] = value
    return pairs


class Command(EngineCommand):
    help = "Exécute un programme sur quatre serveurs simulés"
    command = RunRecord.Command.RUN

    def add_arguments(self, parser: CommandParser) -> None:
        parser.add_argument("program", type=Path, help="Programme en s-expressions")
        parser.add_argument(
            "--input",
            action="append",
            metavar="NOM=CHEMIN",
            help="Entrée privée (CSV ou QSTN), répétable",
        )
        parser.add_argument(
            "--param",
            action="append",
            metavar="NOM=VALEUR",
            help="Surcharge d'un paramètre (public nom valeur)",
        )
        parser.add_argument(
            "--output-dir",
            type=Path,
            help="Dossier des sorties révélées (par défaut celui du programme)",
        )
        super().add_arguments(parser)

    def target(self, options: dict[str, Any]) -> str:
        return str(options["program"])

    def check_options(self, options: dict[str, Any]) -> None:
        self.inputs = parse_assignments(options.get("input"), "--input")
        self.params = parse_assignments(options.get("param"), "--param")
        for name, path in self.inputs.items():
            if not Path(path).is_file():
                raise usage_error(f"Fichier d'entrée introuvable pour {name} : {path}")

    def execute_run(
        self, engine: Engine, config: dict[str, Any], options: dict[str, Any]
    ) -> RunReport:
        program = read_program(options["program"])
        if self.params:
            program = program.with_params(
                {name: parse_literal(value) for name, value in self.params.items()}
            )
        bindings = {
            name: load_values(path, engine.config)
            for name, path in self.inputs.items()
        }
        if config["optimize"]:
            program = optimize(program)
        else:
            check_reject(program)

        interpreter = Interpreter(engine)
        interpreter.share_inputs(program, bindings)
        interpreter.execute(program)
        outputs = interpreter.reveal_outputs()

        output_dir = options.get("output_dir") or Path(options["program"]).parent
        try:
            output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise usage_error(f"Dossier de sortie impossible : {output_dir}") from exc
        written: dict[str, Any] = {}
        for name, values in outputs.items():
            path = output_dir / f"{name}.csv"
            save_values(path, values, engine.config)
            written[name] = {"shape": list(values.shape), "path": str(path)}

        return RunReport(
            target=self.target(options),
            stats=interpreter.phases["compute"],
            summary={
                "outputs": written,
                "rounds": {
                    phase: stats.total_rounds
                    for phase, stats in interpreter.phases.items()
                },
            },
        )
