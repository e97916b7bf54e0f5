"""
Exceptions de l'app tensor.
"""

from ring.exceptions import EngineError


class ShapeError(EngineError, ValueError):
    """Formes incompatibles (diffusion, produit, réindexation)."""

    def __init__(self, message: str, axis: int | None = None) -> None:
        super().__init__(message)
        self.axis = axis


class EmptyAxisError(EngineError, ValueError):
    """Réduction sur un axe vide."""


class TensorIOError(EngineError, OSError):
    """Lecture ou écriture d'un fichier de tenseur impossible."""
