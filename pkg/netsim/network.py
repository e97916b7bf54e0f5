"""
Réseau simulé en mémoire : participants, boîtes aux lettres et époques.

Une époque (``run_round``) exécute l'étape de chaque participant contre son
propre ``PartyContext``. Les envois sont mis en tampon puis livrés à la
barrière de fin d'époque : un message envoyé pendant l'époque k n'est lisible
qu'à partir de l'époque k+1.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Callable, Hashable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import structlog

from .exceptions import DeadlockError
from .latency import LatencyModel
from .stats import NetStats, PartyStats

logger = structlog.get_logger(__name__)


class SchedulingMode(StrEnum):
    LOCKSTEP = "lockstep"
    ACTOR = "actor"


@dataclass(frozen=True)
class Message:
    """Message point à point ; seul ``payload`` transporte des données."""

    sender: str
    recipient: str
    round_tag: int
    label: str
    payload: bytes = field(repr=False)
    bit_length: int

    def header(self) -> tuple[str, str, int, str, int]:
        return (
            self.sender, self.recipient, self.round_tag, self.label, self.bit_length
        )


@dataclass
class Node:
    """Un participant enregistré : son état privé et sa boîte aux lettres."""

    pid: Hashable
    state: Any = None
    inbox: dict[tuple[str, str], deque[Message]] = field(default_factory=dict)


class PartyContext:
    """Vue d'un participant pendant une époque.

    Le contexte ne donne accès qu'à l'état et à la boîte aux lettres du
    participant lui-même.
    """

    def __init__(self, network: Network, node: Node, round_tag: int) -> None:
        self._network = network
        self._node = node
        self._outbox: list[Message] = []
        self.round_tag = round_tag

    @property
    def pid(self) -> Hashable:
        return self._node.pid

    @property
    def state(self) -> Any:
        return self._node.state

    def send(
        self,
        recipient: Hashable,
        label: str,
        payload: bytes,
        bit_length: int | None = None,
    ) -> None:
        """Met un message en tampon ; il sera livré à la fin de l'époque."""
        if not self._network.is_registered(recipient):
            raise ValueError(f"Destinataire inconnu : {recipient}")
        if str(recipient) == str(self.pid):
            raise ValueError("Un participant ne s'envoie pas de message")
        self._outbox.append(
            Message(
                sender=str(self.pid),
                recipient=str(recipient),
                round_tag=self.round_tag,
                label=label,
                payload=payload,
                bit_length=len(payload) * 8 if bit_length is None else bit_length,
            )
        )

    def recv(self, sender: Hashable, label: str) -> Message:
        """Retire le plus ancien message ``label`` reçu de ``sender``."""
        queue = self._node.inbox.get((str(sender), label))
        if not queue:
            raise DeadlockError(
                f"{self.pid} attend {label!r} de {sender}, message jamais envoyé"
            )
        return queue.popleft()


StepFn = Callable[[Any], None]


class Network:
    """Réseau déterministe de participants synchronisés par époques."""

    def __init__(
        self,
        latency: LatencyModel | None = None,
        mode: SchedulingMode | str = SchedulingMode.LOCKSTEP,
        context_cls: type[PartyContext] = PartyContext,
    ) -> None:
        self.latency = latency or LatencyModel()
        self.mode = SchedulingMode(mode)
        self._context_cls = context_cls
        self._nodes: dict[str, Node] = {}
        self._stats: dict[str, PartyStats] = {}
        self._epoch = 0
        self._total_rounds = 0
        self._simulated_ms = 0.0
        self.trace: list[tuple[str, str, int, str, int]] = []

    def register(self, pid: Hashable, state: Any = None) -> Node:
        key = str(pid)
        if key in self._nodes:
            raise ValueError(f"Participant déjà enregistré : {pid}")
        node = Node(pid=pid, state=state)
        self._nodes[key] = node
        return node

    def unregister(self, pid: Hashable) -> None:
        """Détache un participant transitoire (client)."""
        self._nodes.pop(str(pid), None)

    def is_registered(self, pid: Hashable) -> bool:
        return str(pid) in self._nodes

    def node(self, pid: Hashable) -> Node:
        return self._nodes[str(pid)]

    @property
    def parties(self) -> tuple[Hashable, ...]:
        return tuple(node.pid for node in self._nodes.values())

    def run_round(self, steps: Mapping[Hashable, StepFn]) -> None:
        """Exécute une époque : étapes, barrière, livraisons."""
        self._epoch += 1
        contexts: list[PartyContext] = []
        for pid in steps:
            if not self.is_registered(pid):
                raise ValueError(f"Participant non enregistré : {pid}")
            contexts.append(self._context_cls(self, self.node(pid), self._epoch))

        pairs = list(zip(steps.values(), contexts, strict=True))
        if self.mode is SchedulingMode.ACTOR and len(pairs) > 1:
            with ThreadPoolExecutor(max_workers=len(pairs)) as pool:
                futures = [pool.submit(step, ctx) for step, ctx in pairs]
                for future in futures:
                    future.result()
        else:
            for step, ctx in pairs:
                step(ctx)

        self._deliver(contexts)

    def _deliver(self, contexts: list[PartyContext]) -> None:
        # Ordre de livraison : ordre d'enregistrement, puis ordre d'envoi.
        order = {key: i for i, key in enumerate(self._nodes)}
        contexts = sorted(contexts, key=lambda c: order[str(c.pid)])
        max_bytes = 0
        messages = 0
        for ctx in contexts:
            if not ctx._outbox:
                continue
            sent_bytes = sum(len(m.payload) for m in ctx._outbox)
            sent_bits = sum(m.bit_length for m in ctx._outbox)
            key = str(ctx.pid)
            self._stats[key] = self._stats.get(key, PartyStats()) + PartyStats(
                messages=len(ctx._outbox), bytes=sent_bytes, bits=sent_bits, rounds=1
            )
            for message in ctx._outbox:
                recipient = self._nodes.get(message.recipient)
                if recipient is None:
                    raise ValueError(f"Destinataire détaché : {message.recipient}")
                recipient.inbox.setdefault(
                    (message.sender, message.label), deque()
                ).append(message)
                self.trace.append(message.header())
            max_bytes = max(max_bytes, sent_bytes)
            messages += len(ctx._outbox)

        if messages:
            self._total_rounds += 1
            self._simulated_ms += self.latency.epoch_ms(max_bytes)
            logger.debug(
                "network.epoch",
                round_tag=self._epoch,
                messages=messages,
                max_bytes=max_bytes,
            )

    def undelivered(self) -> int:
        """Nombre de messages livrés mais jamais lus."""
        return sum(len(q) for node in self._nodes.values() for q in node.inbox.values())

    def stats_snapshot(self) -> NetStats:
        return NetStats(
            parties=dict(self._stats),
            total_rounds=self._total_rounds,
            simulated_ms=self._simulated_ms,
        )
