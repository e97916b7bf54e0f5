"""
Modèle de latence du réseau simulé.

Le modèle n'influence que le temps simulé, jamais l'ordre des messages ni les
résultats.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum


class LatencyMode(StrEnum):
    NONE = "none"
    LAN = "lan"
    WAN = "wan"


@dataclass(frozen=True)
class LatencyModel:
    """Temps d'une époque : ``rtt + octets_max · 8 / débit``."""

    mode: LatencyMode = LatencyMode.NONE
    rtt_ms: float = 0.0
    bandwidth_mbps: float = 0.0

    @classmethod
    def preset(cls, name: str) -> LatencyModel:
        """Construit l'un des préréglages ``none``, ``lan`` ou ``wan``."""
        mode = LatencyMode(name)
        if mode is LatencyMode.LAN:
            return cls(mode, rtt_ms=0.2, bandwidth_mbps=10_000.0)
        if mode is LatencyMode.WAN:
            return cls(mode, rtt_ms=100.0, bandwidth_mbps=50.0)
        return cls()

    def epoch_ms(self, max_party_bytes: int) -> float:
        """Durée simulée d'une époque selon la plus grosse émission."""
        if self.mode is LatencyMode.NONE:
            return 0.0
        # 1 Mbps = 1000 bits par milliseconde
        transfer_ms = max_party_bytes * 8 / (self.bandwidth_mbps * 1000.0)
        return self.rtt_ms + transfer_ms
