"""
Aléa corrélé : une graine de PRF par paire de serveurs.

Chaque flux est un générateur Philox en mode compteur. La clé est la graine
de la paire, le compteur d'invocation occupe le troisième mot du compteur
Philox, si bien qu'aucun couple (clé, compteur) n'est réutilisé.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from ring.arithmetic import RingConfig, reduce

from .parties import SERVER_PAIRS, Server


def _count(shape: tuple[int, ...]) -> int:
    return math.prod(shape)


def uniform_ring(
    bitgen: np.random.BitGenerator, shape: tuple[int, ...], cfg: RingConfig
) -> np.ndarray:
    """Tire des éléments uniformes de Z_{2^n} (mots de 64 bits concaténés)."""
    count = _count(shape)
    words = (cfg.n + 63) // 64
    raw = bitgen.random_raw(count * words).astype(object).reshape(count, words)
    acc = raw[:, 0].copy()
    for j in range(1, words):
        acc = acc | (raw[:, j] << (64 * j))
    return reduce(acc, cfg).reshape(shape)


def uniform_bits(bitgen: np.random.BitGenerator, shape: tuple[int, ...]) -> np.ndarray:
    """Tire des bits uniformes (``uint8`` valant 0 ou 1)."""
    count = _count(shape)
    raw = np.asarray(bitgen.random_raw((count + 63) // 64), dtype=np.uint64)
    bits = np.unpackbits(raw.view(np.uint8), bitorder="little")[:count]
    return bits.reshape(shape)


class PrfStream:
    """Flux pseudo-aléatoire d'un participant pour une graine donnée."""

    def __init__(self, key: int) -> None:
        self.key = key
        self.counter = 0

    def _next(self) -> np.random.Philox:
        bitgen = np.random.Philox(key=self.key, counter=self.counter << 128)
        self.counter += 1
        return bitgen

    def ring(self, shape: tuple[int, ...], cfg: RingConfig) -> np.ndarray:
        return uniform_ring(self._next(), shape, cfg)

    def bits(self, shape: tuple[int, ...]) -> np.ndarray:
        return uniform_bits(self._next(), shape)


@dataclass(frozen=True)
class SeedTable:
    """Les six graines de 128 bits, une par paire non ordonnée de serveurs."""

    keys: Mapping[frozenset[Server], int]

    @classmethod
    def derive(cls, seed: int) -> SeedTable:
        """Dérive les graines de façon déterministe depuis ``seed``."""
        state = np.random.SeedSequence(seed).generate_state(
            2 * len(SERVER_PAIRS), dtype=np.uint64
        )
        keys = {
            pair: int(state[2 * i]) | (int(state[2 * i + 1]) << 64)
            for i, pair in enumerate(SERVER_PAIRS)
        }
        return cls(keys)

    def streams_for(self, pid: Server) -> dict[frozenset[Server], PrfStream]:
        """Flux propres à ``pid`` : un par graine qu'il détient."""
        return {pair: PrfStream(key) for pair, key in self.keys.items() if pid in pair}
