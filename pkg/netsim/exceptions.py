"""
Exceptions de l'app netsim.
"""

from ring.exceptions import EngineError


class DeadlockError(EngineError):
    """Un participant attend un message qui n'a jamais été envoyé."""
