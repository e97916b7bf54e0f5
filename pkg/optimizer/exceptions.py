"""
Exceptions de l'app optimizer.
"""

from ring.exceptions import EngineError


class RejectionError(EngineError):
    """Construction refusée avant exécution (branche sur une condition privée)."""

    def __init__(self, message: str, node: object = None) -> None:
        super().__init__(message)
        self.node = node


class ProgramSyntaxError(EngineError, ValueError):
    """Programme mal formé : syntaxe, variable inconnue, appel inconnu."""
