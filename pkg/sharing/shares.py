"""
Partage répliqué 2-parmi-4 : disposition des composantes et découpage client.

Disposition pour un secret x = x1 + x2 = x1' + x2' :

* S1 détient (x1, x1')
* S2 détient (x2, x2')
* Sa détient (xa, xa') = (x2, x1')
* Sb détient (xb, xb') = (x1, x2')

Les partages de bits ont la même disposition sur Z_2 (addition = XOR).
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np

from ring.arithmetic import FixedPoint, RingConfig, RingValue, reduce

from .parties import Server
from .prf import PrfStream, uniform_ring


class ShareKind(StrEnum):
    ARITHMETIC = "arithmetic"
    BIT = "bit"


# Composantes qui reçoivent une constante publique : (première, seconde).
PUBLIC_SLOTS: dict[Server, tuple[bool, bool]] = {
    Server.S1: (True, True),
    Server.S2: (False, False),
    Server.SA: (False, True),
    Server.SB: (True, False),
}

COMPONENT_NAMES: dict[Server, tuple[str, str]] = {
    Server.S1: ("x1", "x1'"),
    Server.S2: ("x2", "x2'"),
    Server.SA: ("xa", "xa'"),
    Server.SB: ("xb", "xb'"),
}


@dataclass(frozen=True)
class LocalShare:
    """La paire de composantes qu'un serveur détient pour un tenseur."""

    first: np.ndarray
    second: np.ndarray

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(np.shape(self.first))

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> LocalShare:
        """Applique la même transformation aux deux composantes."""
        return LocalShare(fn(self.first), fn(self.second))

    def broadcast_to(self, shape: tuple[int, ...]) -> LocalShare:
        return self.map(lambda a: np.broadcast_to(a, shape))


@dataclass
class PartyState:
    """État privé d'un participant : stockage, flux PRF, mémoire de travail."""

    pid: Any
    config: RingConfig
    streams: dict[frozenset[Server], PrfStream] = field(default_factory=dict)
    store: dict[int, LocalShare] = field(default_factory=dict)
    pending: dict[int, np.ndarray] = field(default_factory=dict)
    scratch: dict[str, Any] = field(default_factory=dict)
    transcript: list[tuple[str, str, np.ndarray]] | None = None


def combine(
    kind: ShareKind, a: np.ndarray, b: np.ndarray, cfg: RingConfig
) -> np.ndarray:
    """Somme de deux composantes dans l'anneau du partage."""
    if kind is ShareKind.BIT:
        return np.bitwise_xor(a, b).astype(np.uint8)
    return reduce(a + b, cfg)


def client_split(
    x: FixedPoint, rng: np.random.Generator
) -> tuple[RingValue, RingValue]:
    """Découpe un réel encodé en ``x1`` uniforme et ``x2 = x - x1``."""
    x1, x2 = split_array(np.asarray(x.raw.value, dtype=object), x.config, rng)
    return RingValue(int(x1), x.config), RingValue(int(x2), x.config)


def split_array(
    raw: np.ndarray, cfg: RingConfig, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Version tableau de ``client_split`` sur des éléments déjà encodés."""
    shape = tuple(np.shape(raw))
    x1 = uniform_ring(rng.bit_generator, shape, cfg)
    x2 = reduce(np.asarray(raw, dtype=object) - x1, cfg)
    return x1, x2


def split_bits(
    bits: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Découpage XOR d'un vecteur de bits."""
    from .prf import uniform_bits

    x1 = uniform_bits(rng.bit_generator, tuple(np.shape(bits)))
    return x1, np.bitwise_xor(x1, np.asarray(bits, dtype=np.uint8))
