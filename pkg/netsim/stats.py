"""
Compteurs de communication du réseau simulé.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Any


@dataclass(frozen=True)
class PartyStats:
    """Compteurs d'un participant."""

    messages: int = 0
    bytes: int = 0
    bits: int = 0
    rounds: int = 0

    def __sub__(self, other: PartyStats) -> PartyStats:
        return PartyStats(
            *(getattr(self, f.name) - getattr(other, f.name) for f in fields(self))
        )

    def __add__(self, other: PartyStats) -> PartyStats:
        return PartyStats(
            *(getattr(self, f.name) + getattr(other, f.name) for f in fields(self))
        )


@dataclass(frozen=True)
class NetStats:
    """Photographie des compteurs du réseau à un instant donné."""

    parties: dict[str, PartyStats] = field(default_factory=dict)
    total_rounds: int = 0
    simulated_ms: float = 0.0
    wall_ms: float | None = None

    def party(self, pid: object) -> PartyStats:
        """Compteurs d'un participant (nuls s'il n'a jamais émis)."""
        return self.parties.get(str(pid), PartyStats())

    def with_wall_ms(self, wall_ms: float | None) -> NetStats:
        return replace(self, wall_ms=wall_ms)

    def to_json(self, party_ids: tuple[object, ...] | None = None) -> dict[str, Any]:
        """Forme exportée : ``{parties, total_rounds, simulated_ms, wall_ms}``."""
        keys = [str(p) for p in party_ids] if party_ids else sorted(self.parties)
        return {
            "parties": {
                key: {
                    "messages": self.party(key).messages,
                    "bytes": self.party(key).bytes,
                    "rounds": self.party(key).rounds,
                }
                for key in keys
            },
            "total_rounds": self.total_rounds,
            "simulated_ms": round(self.simulated_ms, 6),
            "wall_ms": None if self.wall_ms is None else round(self.wall_ms, 3),
        }


def stats_diff(before: NetStats, after: NetStats) -> NetStats:
    """Différence composante par composante ``after - before``."""
    keys = set(before.parties) | set(after.parties)
    return NetStats(
        parties={key: after.party(key) - before.party(key) for key in sorted(keys)},
        total_rounds=after.total_rounds - before.total_rounds,
        simulated_ms=after.simulated_ms - before.simulated_ms,
    )
