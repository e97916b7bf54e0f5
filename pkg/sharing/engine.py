"""
Moteur d'un calcul : anneau, réseau simulé, graines et options.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Hashable, Mapping
from typing import TYPE_CHECKING, Any

import numpy as np
import structlog

from netsim.latency import LatencyModel
from netsim.network import Network, SchedulingMode
from netsim.stats import NetStats
from ring.arithmetic import RingConfig

from .context import ServerContext
from .parties import SERVERS, ClientId, Server
from .prf import SeedTable
from .shares import PartyState, ShareKind

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor

logger = structlog.get_logger(__name__)

# Mélangé à la graine pour l'aléa des clients, distinct des graines serveurs.
_CLIENT_STREAM = 0x636C69656E74

Step = Callable[[ServerContext], None]


class Engine:
    """Un calcul à quatre serveurs.

    L'engine ne détient aucun partage : chaque serveur stocke ses propres
    composantes dans son ``PartyState``. Les tenseurs manipulés par
    l'appelant ne sont que des poignées (``ShareTensor``).
    """

    def __init__(
        self,
        config: RingConfig | None = None,
        *,
        seed: int = 0,
        latency: LatencyModel | str | None = None,
        mode: SchedulingMode | str = SchedulingMode.LOCKSTEP,
        ppa: bool = False,
        half_sharing: bool = False,
        debug_checks: bool = False,
        transcripts: bool = False,
    ) -> None:
        if seed < 0:
            raise ValueError("La graine doit être positive ou nulle")
        self.config = config or RingConfig()
        self.seed = seed
        if isinstance(latency, str):
            latency = LatencyModel.preset(latency)
        self.network = Network(latency, mode, context_cls=ServerContext)
        self.seeds = SeedTable.derive(seed)
        for pid in SERVERS:
            self.network.register(
                pid,
                PartyState(
                    pid,
                    self.config,
                    self.seeds.streams_for(pid),
                    transcript=[] if transcripts else None,
                ),
            )
        self.client_rng = np.random.default_rng(
            np.random.SeedSequence([seed, _CLIENT_STREAM])
        )
        self.ppa = ppa
        self.half_sharing = half_sharing
        self.debug_checks = debug_checks
        self.transcripts = transcripts
        self._tids = itertools.count(1)
        self._tags = itertools.count(1)

    @classmethod
    def from_settings(cls, **overrides: Any) -> Engine:
        """Construit un engine depuis les valeurs par défaut configurées."""
        from config.defaults import engine_defaults

        defaults = engine_defaults()
        options: dict[str, Any] = {
            "config": RingConfig(defaults.ring_bits, defaults.fraction_bits),
            "seed": defaults.seed,
            "latency": defaults.latency,
            "ppa": defaults.ppa,
            "half_sharing": defaults.half_sharing,
            "debug_checks": defaults.debug_checks,
        }
        options.update(overrides)
        return cls(**options)

    # Participants ---------------------------------------------------------

    def state(self, pid: Hashable) -> PartyState:
        """État d'un participant (réservé à l'oracle et aux tests)."""
        state = self.network.node(pid).state
        assert isinstance(state, PartyState)
        return state

    def attach_client(self, client: ClientId) -> PartyState:
        if not self.network.is_registered(client):
            self.network.register(client, PartyState(client, self.config))
        return self.state(client)

    def detach_client(self, client: ClientId) -> None:
        self.network.unregister(client)

    # Tenseurs -------------------------------------------------------------

    def allocate(
        self, shape: tuple[int, ...], kind: ShareKind = ShareKind.ARITHMETIC
    ) -> ShareTensor:
        """Réserve une poignée ; les serveurs y stockeront leurs composantes."""
        from tensor.share_tensor import ShareTensor

        return ShareTensor(self, next(self._tids), tuple(shape), ShareKind(kind))

    def release(self, tid: int) -> None:
        for pid in SERVERS:
            if self.network.is_registered(pid):
                self.state(pid).store.pop(tid, None)

    def tag(self, prefix: str) -> str:
        """Identifiant unique d'une invocation de protocole."""
        return f"{prefix}#{next(self._tags)}"

    # Exécution ------------------------------------------------------------

    def run(self, steps: Mapping[Hashable, Step]) -> None:
        """Une époque du réseau avec une étape par participant."""
        self.network.run_round(steps)

    def each_server(self, step: Step) -> None:
        """Une époque où les quatre serveurs exécutent la même étape."""
        self.network.run_round(dict.fromkeys(SERVERS, step))

    def local(
        self,
        fn: Callable[..., Any],
        inputs: tuple[ShareTensor, ...],
        shape: tuple[int, ...],
        kind: ShareKind = ShareKind.ARITHMETIC,
    ) -> ShareTensor:
        """Opération locale : ``fn(pid, *partages_locaux)`` sur chaque serveur."""
        out = self.allocate(shape, kind)

        def step(ctx: ServerContext) -> None:
            assert isinstance(ctx.pid, Server)
            ctx.store(out, fn(ctx.pid, *(ctx.load(t) for t in inputs)))

        self.each_server(step)
        return out

    def stats_snapshot(self) -> NetStats:
        return self.network.stats_snapshot()

    # Raccourcis vers l'algèbre des partages -------------------------------

    def ss(
        self,
        values: Any,
        client: ClientId | None = None,
        kind: ShareKind = ShareKind.ARITHMETIC,
    ) -> ShareTensor:
        """Partage secret par un client (encodage, découpage, distribution)."""
        from .algebra import secret_share

        return secret_share(self, values, client or ClientId(0), kind)

    def public(
        self, values: Any, kind: ShareKind = ShareKind.ARITHMETIC
    ) -> ShareTensor:
        from .algebra import public

        return public(self, values, kind)

    def reveal(
        self, tensor: ShareTensor, to: tuple[Hashable, ...] | None = None
    ) -> np.ndarray:
        from .algebra import reveal

        return reveal(tensor, to)

    def __repr__(self) -> str:
        return (
            f"Engine(n={self.config.n}, d={self.config.d}, seed={self.seed}, "
            f"mode={self.network.mode})"
        )
