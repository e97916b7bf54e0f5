"""
Exceptions communes du moteur.
"""


class EngineError(Exception):
    """Erreur de base levée par le moteur de calcul partagé."""


class RingOverflowError(EngineError, OverflowError):
    """Valeur hors de la plage représentable en virgule fixe."""
