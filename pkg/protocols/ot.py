"""
Transfert inconscient à quatre serveurs : c·x pour un bit partagé c.

c·x = c1'x1 + (1 - 2c1')c2'x1 + c2'x2 + (1 - 2c2')c1'x2 ; les termes
c'x sont locaux, seuls les facteurs (1 - 2c') croisés demandent un échange.
Une ronde, quatre éléments de l'anneau envoyés par serveur, sans troncature.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np

from ring.arithmetic import reduce
from sharing.context import ServerContext
from sharing.oracle import private_operation
from sharing.parties import Server
from sharing.shares import LocalShare, ShareKind
from tensor.shape import broadcast

from .routing import MASK_PEER

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor

# (t', e) partent vers A, (t, e') vers B.
OT_ROUTES: dict[Server, tuple[Server, Server]] = {
    Server.S1: (Server.SA, Server.SB),
    Server.S2: (Server.SB, Server.SA),
    Server.SA: (Server.S1, Server.S2),
    Server.SB: (Server.S2, Server.S1),
}

# Graine du masque de e, puis de celui de e'.
E_PEER: dict[Server, Server] = {
    Server.S1: Server.SB,
    Server.S2: Server.SA,
    Server.SA: Server.S2,
    Server.SB: Server.S1,
}
E_PRIME_PEER: dict[Server, Server] = {
    Server.S1: Server.SA,
    Server.S2: Server.SB,
    Server.SA: Server.S1,
    Server.SB: Server.S2,
}

# Expéditeurs qui me désignent comme A, resp. comme B.
A_SENDER: dict[Server, Server] = {a: src for src, (a, _) in OT_ROUTES.items()}
B_SENDER: dict[Server, Server] = {b: src for src, (_, b) in OT_ROUTES.items()}


def _ring(bits: np.ndarray) -> np.ndarray:
    return np.asarray(bits).astype(object)


@private_operation("ot")
def ot_select(c: ShareTensor, x: ShareTensor) -> ShareTensor:
    """x si c = 1, 0 sinon ; résultat exact."""
    if c.kind is not ShareKind.BIT or x.kind is not ShareKind.ARITHMETIC:
        raise TypeError("ot_select attend un bit partagé et un partage arithmétique")
    if c.engine is not x.engine:
        raise ValueError("Les tenseurs doivent appartenir au même engine")
    engine = x.engine
    cfg = engine.config
    shape = broadcast(c.shape, x.shape)
    out = engine.allocate(shape, ShareKind.ARITHMETIC)
    tag = engine.tag("ot")

    def send(ctx: ServerContext) -> None:
        pid = Server(ctx.pid)
        bit = ctx.load(c).broadcast_to(shape)
        val = ctx.load(x).broadcast_to(shape)
        c_first, c_second = _ring(bit.first), _ring(bit.second)
        peer = MASK_PEER[pid]
        r = ctx.draw(peer, shape)
        rp = ctx.draw(peer, shape)
        r_e = ctx.draw(E_PEER[pid], shape)
        r_ep = ctx.draw(E_PRIME_PEER[pid], shape)
        t = reduce(c_second * val.first - r, cfg)
        tp = reduce(c_first * val.second - rp, cfg)
        e = reduce((1 - 2 * c_second) * r + r_e, cfg)
        ep = reduce((1 - 2 * c_first) * rp + r_ep, cfg)
        for name, value in (("t", t), ("t'", tp), ("e", e), ("e'", ep)):
            ctx.record(tag, name, value)
        to_a, to_b = OT_ROUTES[pid]
        ctx.send_ring(to_a, f"{tag}:tp", tp)
        ctx.send_ring(to_a, f"{tag}:e", e)
        ctx.send_ring(to_b, f"{tag}:t", t)
        ctx.send_ring(to_b, f"{tag}:ep", ep)
        ctx.scratch[tag] = (c_first, c_second, val, r_e, r_ep)

    engine.each_server(send)

    def finish(ctx: ServerContext) -> None:
        pid = Server(ctx.pid)
        c_first, c_second, val, r_e, r_ep = ctx.scratch.pop(tag)
        from_a, from_b = A_SENDER[pid], B_SENDER[pid]
        t = ctx.recv_ring(from_b, f"{tag}:t", shape)
        ep = ctx.recv_ring(from_b, f"{tag}:ep", shape)
        tp = ctx.recv_ring(from_a, f"{tag}:tp", shape)
        e = ctx.recv_ring(from_a, f"{tag}:e", shape)
        first = (1 - 2 * c_second) * t + c_second * val.first + e - r_e
        second = (1 - 2 * c_first) * tp + c_first * val.second + ep - r_ep
        ctx.store(out, LocalShare(reduce(first, cfg), reduce(second, cfg)))

    engine.each_server(finish)
    return out


@private_operation("mux")
def mux(c: ShareTensor, x: Any, y: Any) -> ShareTensor:
    """x si c = 1, y sinon : y + OT(c, x - y)."""
    from tensor.share_tensor import ShareTensor

    if not isinstance(x, ShareTensor) and not isinstance(y, ShareTensor):
        x = c.engine.public(x)
    return ot_select(c, x - y) + y
