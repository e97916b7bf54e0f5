"""
Contexte d'exécution d'un participant pendant un protocole.
"""

from __future__ import annotations

from collections.abc import Hashable
from typing import TYPE_CHECKING, Any

import numpy as np

from netsim.network import PartyContext
from ring.arithmetic import RingConfig, reduce

from .codec import decode_bits, decode_ring, encode_bits, encode_ring
from .parties import Server, pair
from .prf import PrfStream
from .shares import LocalShare, PartyState, ShareKind, combine

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor


class ServerContext(PartyContext):
    """``PartyContext`` enrichi : stockage local, PRF et codec des partages."""

    @property
    def party(self) -> PartyState:
        state = self.state
        assert isinstance(state, PartyState)
        return state

    @property
    def config(self) -> RingConfig:
        return self.party.config

    @property
    def scratch(self) -> dict[str, Any]:
        return self.party.scratch

    def load(self, tensor: ShareTensor) -> LocalShare:
        return self.party.store[tensor.tid]

    def store(self, tensor: ShareTensor, share: LocalShare) -> None:
        if share.shape != tensor.shape:
            raise ValueError(
                f"Forme {share.shape} stockée pour un tenseur de forme {tensor.shape}"
            )
        self.party.store[tensor.tid] = share

    def prf(self, peer: Server) -> PrfStream:
        """Flux de la graine partagée avec ``peer``."""
        assert isinstance(self.pid, Server)
        return self.party.streams[pair(self.pid, peer)]

    def record(self, op: str, name: str, value: np.ndarray) -> None:
        """Consigne une valeur intermédiaire (mode transcript uniquement)."""
        if self.party.transcript is not None:
            self.party.transcript.append((op, name, np.copy(value)))

    def send_ring(self, recipient: Hashable, label: str, values: np.ndarray) -> None:
        self.send(recipient, label, encode_ring(values, self.config))

    def recv_ring(
        self, sender: Hashable, label: str, shape: tuple[int, ...]
    ) -> np.ndarray:
        message = self.recv(sender, label)
        return decode_ring(message.payload, self.config, shape)

    def send_bits(self, recipient: Hashable, label: str, bits: np.ndarray) -> None:
        payload, bit_length = encode_bits(bits)
        self.send(recipient, label, payload, bit_length)

    def recv_bits(
        self, sender: Hashable, label: str, shape: tuple[int, ...]
    ) -> np.ndarray:
        message = self.recv(sender, label)
        return decode_bits(message.payload, shape)

    # Raccourcis indépendants du type de partage ---------------------------

    def draw(
        self,
        peer: Server,
        shape: tuple[int, ...],
        kind: ShareKind = ShareKind.ARITHMETIC,
    ) -> np.ndarray:
        """Tire un masque de la graine partagée avec ``peer``."""
        stream = self.prf(peer)
        if kind is ShareKind.BIT:
            return stream.bits(shape)
        return stream.ring(shape, self.config)

    def send_share(
        self, recipient: Hashable, label: str, values: np.ndarray, kind: ShareKind
    ) -> None:
        if kind is ShareKind.BIT:
            self.send_bits(recipient, label, values)
        else:
            self.send_ring(recipient, label, values)

    def recv_share(
        self, sender: Hashable, label: str, shape: tuple[int, ...], kind: ShareKind
    ) -> np.ndarray:
        if kind is ShareKind.BIT:
            return self.recv_bits(sender, label, shape)
        return self.recv_ring(sender, label, shape)

    def add(self, kind: ShareKind, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return combine(kind, a, b, self.config)

    def sub(self, kind: ShareKind, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if kind is ShareKind.BIT:
            return combine(kind, a, b, self.config)
        return reduce(np.asarray(a, dtype=object) - b, self.config)
