"""
Lecture des valeurs intermédiaires consignées par les protocoles.

Les transcripts n'existent que si l'engine a été créé avec
``transcripts=True`` ; chaque serveur n'y consigne que ses propres valeurs.
"""

from __future__ import annotations

from collections.abc import Hashable
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from ring.arithmetic import reduce, to_signed
from sharing.parties import SERVERS, Server

if TYPE_CHECKING:
    from sharing.engine import Engine


@dataclass
class Transcript:
    """Valeurs d'une invocation de protocole, indexées par (serveur, nom)."""

    tag: str
    values: dict[tuple[Hashable, str], np.ndarray] = field(default_factory=dict)

    def get(self, pid: Server, name: str) -> np.ndarray:
        try:
            return self.values[(pid, name)]
        except KeyError as exc:
            raise KeyError(f"{name!r} non consigné par {pid} pour {self.tag}") from exc

    def names(self, pid: Server) -> list[str]:
        return [name for owner, name in self.values if owner == pid]


def transcripts(engine: Engine, prefix: str) -> list[Transcript]:
    """Toutes les invocations dont l'étiquette commence par ``prefix#``."""
    if not engine.transcripts:
        raise RuntimeError("Engine créé sans transcripts")
    found: dict[str, Transcript] = {}
    for pid in SERVERS:
        log = engine.state(pid).transcript or []
        for tag, name, value in log:
            if tag.split("#", 1)[0] == prefix:
                found.setdefault(tag, Transcript(tag)).values[(pid, name)] = value
    return sorted(found.values(), key=lambda t: int(t.tag.split("#", 1)[1]))


def latest(engine: Engine, prefix: str) -> Transcript:
    found = transcripts(engine, prefix)
    if not found:
        raise LookupError(f"Aucun transcript pour {prefix!r}")
    return found[-1]


def truncation_wrapped(engine: Engine, transcript: Transcript) -> np.ndarray:
    """Éléments où le partage à deux parties (S1, S2) du produit a débordé.

    Hors débordement, le produit révélé vaut ⌊p/2^d⌋ ou ⌊p/2^d⌋ + 1.
    """
    cfg = engine.config
    z1 = transcript.get(Server.S1, "z")
    z2 = transcript.get(Server.S2, "z")
    exact = to_signed(z1, cfg) + to_signed(z2, cfg)
    wrapped = to_signed(reduce(z1 + z2, cfg), cfg)
    return np.asarray(exact != wrapped, dtype=bool)


def clear(engine: Engine) -> None:
    for pid in SERVERS:
        log = engine.state(pid).transcript
        if log is not None:
            log.clear()
