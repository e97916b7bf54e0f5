"""
Algèbre des partages : initialisation, additions gratuites et révélation.
"""

from __future__ import annotations

from collections.abc import Hashable
from typing import TYPE_CHECKING, Any

import numpy as np

from ring.arithmetic import decode_array, encode_array, reduce
from tensor.shape import broadcast

from .context import ServerContext
from .oracle import private_operation
from .parties import ClientId, Server
from .shares import (
    PUBLIC_SLOTS,
    LocalShare,
    ShareKind,
    combine,
    split_array,
    split_bits,
)

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor

    from .engine import Engine

# Détenteurs de x1 (première composante de S1 et Sb) et de x2 (S2 et Sa).
_HOLDS_X1 = (Server.S1, Server.SB)
_HOLDS_X2 = (Server.S2, Server.SA)


def public_raw(engine: Engine, values: Any, kind: ShareKind) -> np.ndarray:
    """Encode une constante publique dans l'anneau du partage."""
    kind = ShareKind(kind)
    if kind is ShareKind.BIT:
        bits = np.asarray(values)
        if bits.size and not np.isin(bits, (0, 1)).all():
            raise ValueError("Un partage de bits n'accepte que 0 et 1")
        return bits.astype(np.uint8)
    return encode_array(values, engine.config)


def _zeros(shape: tuple[int, ...], kind: ShareKind) -> np.ndarray:
    if kind is ShareKind.BIT:
        return np.zeros(shape, dtype=np.uint8)
    return np.zeros(shape, dtype=object)


@private_operation("public")
def public(
    engine: Engine, values: Any, kind: ShareKind = ShareKind.ARITHMETIC
) -> ShareTensor:
    """Partage déterministe d'une constante : x1 = x1' = v, x2 = x2' = 0."""
    kind = ShareKind(kind)
    raw = public_raw(engine, values, kind)
    zero = _zeros(raw.shape, kind)

    def fn(pid: Server) -> LocalShare:
        first, second = PUBLIC_SLOTS[pid]
        return LocalShare(raw if first else zero, raw if second else zero)

    return engine.local(fn, (), tuple(raw.shape), kind)


@private_operation("share_init")
def share_init(
    engine: Engine,
    x1: np.ndarray,
    x2: np.ndarray,
    kind: ShareKind = ShareKind.ARITHMETIC,
) -> ShareTensor:
    """Établit la disposition répliquée depuis x1 (chez S1) et x2 (chez S2)."""
    shape = tuple(np.shape(x1))
    if tuple(np.shape(x2)) != shape:
        raise ValueError("x1 et x2 doivent avoir la même forme")
    out = engine.allocate(shape, kind)
    engine.state(Server.S1).pending[out.tid] = np.asarray(x1)
    engine.state(Server.S2).pending[out.tid] = np.asarray(x2)
    _initialize(engine, out)
    return out


def _initialize(
    engine: Engine,
    out: ShareTensor,
    source: ClientId | None = None,
    tag: str | None = None,
) -> None:
    shape, kind, tid = out.shape, out.kind, out.tid
    tag = tag or engine.tag("init")

    def own_half(ctx: ServerContext, label: str) -> np.ndarray:
        if source is None:
            return ctx.party.pending.pop(tid)
        return ctx.recv_share(source, f"{tag}:{label}", shape, kind)

    # Époque 1 : x1 -> Sb, x2 -> Sa.
    def s1_forward(ctx: ServerContext) -> None:
        x1 = own_half(ctx, "x1")
        ctx.scratch[tag] = x1
        ctx.send_share(Server.SB, f"{tag}:x1", x1, kind)

    def s2_forward(ctx: ServerContext) -> None:
        x2 = own_half(ctx, "x2")
        ctx.scratch[tag] = x2
        ctx.send_share(Server.SA, f"{tag}:x2", x2, kind)

    engine.run({Server.S1: s1_forward, Server.S2: s2_forward})

    # Époque 2 : x1' = x1 - r -> Sa, x2' = x2 + r -> Sb, r tiré de la graine {S1,S2}.
    def s1_mask(ctx: ServerContext) -> None:
        x1 = ctx.scratch.pop(tag)
        r = ctx.draw(Server.S2, shape, kind)
        x1p = ctx.sub(kind, x1, r)
        ctx.send_share(Server.SA, f"{tag}:x1p", x1p, kind)
        ctx.store(out, LocalShare(x1, x1p))

    def s2_mask(ctx: ServerContext) -> None:
        x2 = ctx.scratch.pop(tag)
        r = ctx.draw(Server.S1, shape, kind)
        x2p = ctx.add(kind, x2, r)
        ctx.send_share(Server.SB, f"{tag}:x2p", x2p, kind)
        ctx.store(out, LocalShare(x2, x2p))

    def sa_receive(ctx: ServerContext) -> None:
        ctx.scratch[tag] = ctx.recv_share(Server.S2, f"{tag}:x2", shape, kind)

    def sb_receive(ctx: ServerContext) -> None:
        ctx.scratch[tag] = ctx.recv_share(Server.S1, f"{tag}:x1", shape, kind)

    engine.run(
        {
            Server.S1: s1_mask,
            Server.S2: s2_mask,
            Server.SA: sa_receive,
            Server.SB: sb_receive,
        }
    )

    # Époque 3, sans envoi : Sa et Sb complètent leur paire.
    def sa_finish(ctx: ServerContext) -> None:
        xa = ctx.scratch.pop(tag)
        other = ctx.recv_share(Server.S1, f"{tag}:x1p", shape, kind)
        ctx.store(out, LocalShare(xa, other))

    def sb_finish(ctx: ServerContext) -> None:
        xb = ctx.scratch.pop(tag)
        other = ctx.recv_share(Server.S2, f"{tag}:x2p", shape, kind)
        ctx.store(out, LocalShare(xb, other))

    engine.run({Server.SA: sa_finish, Server.SB: sb_finish})


@private_operation("ss")
def secret_share(
    engine: Engine,
    values: Any,
    client: ClientId,
    kind: ShareKind = ShareKind.ARITHMETIC,
) -> ShareTensor:
    """Le client encode, découpe et livre x1 à S1 et x2 à S2, puis initialisation."""
    kind = ShareKind(kind)
    if kind is ShareKind.BIT:
        x1, x2 = split_bits(public_raw(engine, values, kind), engine.client_rng)
    else:
        raw = encode_array(values, engine.config)
        x1, x2 = split_array(raw, engine.config, engine.client_rng)
    out = engine.allocate(tuple(np.shape(x1)), kind)

    engine.attach_client(client)
    try:
        tag = engine.tag("init")

        def deliver(ctx: ServerContext) -> None:
            ctx.send_share(Server.S1, f"{tag}:x1", x1, kind)
            ctx.send_share(Server.S2, f"{tag}:x2", x2, kind)

        engine.run({client: deliver})
        _initialize(engine, out, source=client, tag=tag)
    finally:
        engine.detach_client(client)
    return out


def reveal_raw(
    tensor: ShareTensor, to: tuple[Hashable, ...] | None = None
) -> np.ndarray:
    """Révèle les éléments bruts (entiers de l'anneau ou bits) aux destinataires."""
    engine = tensor.engine
    recipients = tuple(dict.fromkeys(to or (ClientId(0),)))
    if not recipients:
        raise ValueError("Au moins un destinataire est requis")
    shape, kind = tensor.shape, tensor.kind
    tag = engine.tag("reveal")
    clients = [r for r in recipients if isinstance(r, ClientId)]
    for client in clients:
        engine.attach_client(client)
    try:
        def s1_send(ctx: ServerContext) -> None:
            x1 = ctx.load(tensor).first
            for r in recipients:
                if r not in _HOLDS_X1:
                    ctx.send_share(r, f"{tag}:x1", x1, kind)

        def s2_send(ctx: ServerContext) -> None:
            x2 = ctx.load(tensor).first
            for r in recipients:
                if r not in _HOLDS_X2:
                    ctx.send_share(r, f"{tag}:x2", x2, kind)

        engine.run({Server.S1: s1_send, Server.S2: s2_send})

        def reconstruct(ctx: ServerContext) -> None:
            if ctx.pid in _HOLDS_X1:
                x1 = ctx.load(tensor).first
            else:
                x1 = ctx.recv_share(Server.S1, f"{tag}:x1", shape, kind)
            if ctx.pid in _HOLDS_X2:
                x2 = ctx.load(tensor).first
            else:
                x2 = ctx.recv_share(Server.S2, f"{tag}:x2", shape, kind)
            ctx.scratch[tag] = ctx.add(kind, x1, x2)

        engine.run(dict.fromkeys(recipients, reconstruct))
        results = [engine.state(r).scratch.pop(tag) for r in recipients]
    finally:
        for client in clients:
            engine.detach_client(client)
    return np.asarray(results[0])


def reveal(tensor: ShareTensor, to: tuple[Hashable, ...] | None = None) -> np.ndarray:
    """Révèle et décode : réels ``float64`` ou bits ``uint8``."""
    raw = reveal_raw(tensor, to)
    if tensor.kind is ShareKind.BIT:
        return raw.astype(np.uint8)
    return decode_array(raw, tensor.engine.config)


# Opérations locales ---------------------------------------------------------


def _check_pair(a: ShareTensor, b: ShareTensor) -> None:
    if a.engine is not b.engine:
        raise ValueError("Les deux tenseurs doivent appartenir au même engine")
    if a.kind is not b.kind:
        raise TypeError(f"Partages de natures différentes : {a.kind} et {b.kind}")


@private_operation("add")
def add_shares(a: ShareTensor, b: ShareTensor) -> ShareTensor:
    """Somme locale, sans aucun message (XOR pour les bits)."""
    _check_pair(a, b)
    cfg, kind = a.engine.config, a.kind

    def fn(pid: Server, x: LocalShare, y: LocalShare) -> LocalShare:
        return LocalShare(
            combine(kind, x.first, y.first, cfg), combine(kind, x.second, y.second, cfg)
        )

    return a.engine.local(fn, (a, b), broadcast(a.shape, b.shape), kind)


@private_operation("sub")
def sub(a: ShareTensor, b: ShareTensor) -> ShareTensor:
    _check_pair(a, b)
    cfg, kind = a.engine.config, a.kind

    def diff(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        if kind is ShareKind.BIT:
            return combine(kind, u, v, cfg)
        return reduce(u - v, cfg)

    def fn(pid: Server, x: LocalShare, y: LocalShare) -> LocalShare:
        return LocalShare(diff(x.first, y.first), diff(x.second, y.second))

    return a.engine.local(fn, (a, b), broadcast(a.shape, b.shape), kind)


@private_operation("negate")
def negate(a: ShareTensor) -> ShareTensor:
    """Opposé local ; identité sur Z_2."""
    cfg, kind = a.engine.config, a.kind

    def fn(pid: Server, x: LocalShare) -> LocalShare:
        if kind is ShareKind.BIT:
            return x
        return x.map(lambda v: reduce(-np.asarray(v, dtype=object), cfg))

    return a.engine.local(fn, (a,), a.shape, kind)


@private_operation("add_public")
def add_public(a: ShareTensor, value: Any) -> ShareTensor:
    """Ajoute une constante publique aux composantes x1 et x1'."""
    cfg, kind = a.engine.config, a.kind
    raw = public_raw(a.engine, value, kind)
    shape = broadcast(a.shape, tuple(raw.shape))

    def with_constant(component: np.ndarray, slot: bool) -> np.ndarray:
        if slot:
            return combine(kind, component, raw, cfg)
        return np.broadcast_to(component, shape)

    def fn(pid: Server, x: LocalShare) -> LocalShare:
        first, second = PUBLIC_SLOTS[pid]
        return LocalShare(
            with_constant(x.first, first),
            with_constant(x.second, second),
        )

    return a.engine.local(fn, (a,), shape, kind)


def sub_public(a: ShareTensor, value: Any) -> ShareTensor:
    if a.kind is ShareKind.BIT:
        return add_public(a, value)
    return add_public(a, -np.asarray(value, dtype=np.float64))


def rsub_public(value: Any, a: ShareTensor) -> ShareTensor:
    """``value - a``."""
    return add_public(negate(a), value)
