"""
Exceptions de l'app derived.
"""

from ring.exceptions import EngineError


class DomainError(EngineError, ValueError):
    """Paramètres d'itération hors du domaine où la méthode converge."""
