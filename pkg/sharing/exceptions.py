"""
Exceptions de l'app sharing.
"""

from ring.exceptions import EngineError


class ReplicationError(EngineError, AssertionError):
    """Les composantes répliquées d'un partage ne sont plus cohérentes."""
