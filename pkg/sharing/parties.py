"""
Identités des participants : les quatre serveurs et les clients.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum


class Server(StrEnum):
    """Les quatre serveurs d'un calcul."""

    S1 = "S1"
    S2 = "S2"
    SA = "Sa"
    SB = "Sb"


@dataclass(frozen=True, order=True)
class ClientId:
    """Client transitoire, attaché au réseau pour ``ss`` et ``reveal``."""

    index: int

    def __str__(self) -> str:
        return f"C{self.index}"


PartyId = Server | ClientId

SERVERS: tuple[Server, ...] = (Server.S1, Server.S2, Server.SA, Server.SB)

# Paires de serveurs qui partagent une graine de PRF.
SERVER_PAIRS: tuple[frozenset[Server], ...] = (
    frozenset({Server.S1, Server.S2}),
    frozenset({Server.SA, Server.SB}),
    frozenset({Server.S1, Server.SB}),
    frozenset({Server.S2, Server.SA}),
    frozenset({Server.S1, Server.SA}),
    frozenset({Server.S2, Server.SB}),
)


def pair(a: Server, b: Server) -> frozenset[Server]:
    """Clé de la graine partagée par ``a`` et ``b``."""
    key = frozenset({a, b})
    if key not in SERVER_PAIRS:
        raise ValueError(f"Aucune graine partagée entre {a} et {b}")
    return key
