"""
Multiplication en virgule fixe (une ronde, deux éléments par serveur).

Chaque serveur calcule deux produits croisés de ses composantes, les masque
avec la graine partagée avec son partenaire et les envoie à deux serveurs
distincts. Les sommes reçues forment deux partages à deux parties du
produit, tronqués localement par décalage arithmétique.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from typing import TYPE_CHECKING, Any

import numpy as np

from ring.arithmetic import (
    RingConfig,
    as_ring_array,
    encode_array,
    reduce,
    shift_right,
    to_signed,
)
from sharing.context import ServerContext
from sharing.oracle import private_operation
from sharing.parties import Server
from sharing.shares import PUBLIC_SLOTS, LocalShare, ShareKind
from tensor.shape import Shape, broadcast, broadcast_all

from .routing import MASK_PEER, MASK_SUBTRACTS, PRODUCT_ROUTES

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor

Terms = Callable[..., tuple[np.ndarray, np.ndarray]]


def truncate_pair(
    pid: Server, first: np.ndarray, second: np.ndarray, cfg: RingConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Décalage de d bits, puis +1 sur les composantes x1 et x1'.

    Le résultat révélé vaut ⌊p/2^d⌋ ou ⌊p/2^d⌋ + 1 tant que les deux
    partages de p n'ont pas débordé.
    """
    plus_first, plus_second = PUBLIC_SLOTS[pid]
    first = shift_right(first, cfg.d, cfg)
    second = shift_right(second, cfg.d, cfg)
    if plus_first:
        first = reduce(first + 1, cfg)
    if plus_second:
        second = reduce(second + 1, cfg)
    return first, second


def _normalize(
    kind: ShareKind, value: Any, shape: Shape, cfg: RingConfig
) -> np.ndarray:
    if kind is ShareKind.BIT:
        return np.array(np.broadcast_to(np.asarray(value, dtype=np.uint8), shape))
    wide = np.array(np.broadcast_to(np.asarray(value, dtype=object), shape))
    return reduce(wide, cfg)


def product_round(
    inputs: Sequence[ShareTensor],
    terms: Terms,
    shape: Shape,
    kind: ShareKind = ShareKind.ARITHMETIC,
    truncate: bool = True,
    op: str = "mul",
) -> ShareTensor:
    """Ronde de repartage commune à mul, mul_sum, dot, outer et bit_and.

    ``terms`` reçoit les partages locaux des entrées et retourne les deux
    produits croisés non masqués ``(t, t')``.
    """
    engine = inputs[0].engine
    cfg = engine.config
    out = engine.allocate(shape, kind)
    tag = engine.tag(op)

    def send(ctx: ServerContext) -> None:
        pid = ctx.pid
        assert isinstance(pid, Server)
        t, tp = terms(*(ctx.load(tensor) for tensor in inputs))
        t, tp = _normalize(kind, t, shape, cfg), _normalize(kind, tp, shape, cfg)
        peer = MASK_PEER[pid]
        r, rp = ctx.draw(peer, shape, kind), ctx.draw(peer, shape, kind)
        if MASK_SUBTRACTS[pid]:
            t, tp = ctx.sub(kind, t, r), ctx.sub(kind, tp, rp)
        else:
            t, tp = ctx.add(kind, t, r), ctx.add(kind, tp, rp)
        ctx.record(tag, "t", t)
        ctx.record(tag, "t'", tp)
        to_t, to_tp = PRODUCT_ROUTES[pid]
        ctx.send_share(to_t, f"{tag}:t", t, kind)
        ctx.send_share(to_tp, f"{tag}:tp", tp, kind)
        ctx.scratch[tag] = (t, tp)

    engine.each_server(send)

    def finish(ctx: ServerContext) -> None:
        pid = ctx.pid
        assert isinstance(pid, Server)
        t, tp = ctx.scratch.pop(tag)
        from_t, from_tp = PRODUCT_ROUTES[pid]
        first = ctx.add(kind, t, ctx.recv_share(from_t, f"{tag}:t", shape, kind))
        second = ctx.add(kind, tp, ctx.recv_share(from_tp, f"{tag}:tp", shape, kind))
        if truncate:
            ctx.record(tag, "z", first)
            ctx.record(tag, "z'", second)
            first, second = truncate_pair(pid, first, second, cfg)
        ctx.store(out, LocalShare(first, second))

    engine.each_server(finish)
    return out


def require_arithmetic(*tensors: ShareTensor) -> None:
    for tensor in tensors:
        if tensor.kind is not ShareKind.ARITHMETIC:
            raise TypeError("Opération réservée aux partages arithmétiques")
    engines = {id(t.engine) for t in tensors}
    if len(engines) > 1:
        raise ValueError("Les tenseurs doivent appartenir au même engine")


def _cross(x: LocalShare, y: LocalShare) -> tuple[np.ndarray, np.ndarray]:
    return x.first * y.second, x.second * y.first


@private_operation("mul")
def mul_fixed(x: ShareTensor, y: ShareTensor) -> ShareTensor:
    """Produit en virgule fixe, élément par élément avec diffusion."""
    require_arithmetic(x, y)
    return product_round((x, y), _cross, broadcast(x.shape, y.shape))


@private_operation("mul_sum")
def mul_sum(pairs: Sequence[tuple[ShareTensor, ShareTensor]]) -> ShareTensor:
    """Σ xᵢ·yᵢ avec un seul repartage et une seule troncature."""
    if not pairs:
        raise ValueError("mul_sum attend au moins un couple")
    flat = [t for pair in pairs for t in pair]
    require_arithmetic(*flat)
    shape = broadcast_all(*(t.shape for t in flat))

    def terms(*shares: LocalShare) -> tuple[np.ndarray, np.ndarray]:
        t: Any = 0
        tp: Any = 0
        for x, y in zip(shares[0::2], shares[1::2], strict=True):
            a, b = _cross(x, y)
            t, tp = t + a, tp + b
        return t, tp

    return product_round(flat, terms, shape, op="mul_sum")


@private_operation("mul_public")
def mul_public(x: ShareTensor, value: Any) -> ShareTensor:
    """Produit par une constante publique, sans aucun message.

    Une constante entière multiplie les composantes sans troncature ; sinon
    elle est encodée puis chaque paire est tronquée localement.
    """
    require_arithmetic(x)
    cfg = x.config
    constant = np.asarray(value, dtype=np.float64)
    shape = broadcast(x.shape, tuple(constant.shape))
    integral = bool(np.all(constant == np.round(constant)))
    if integral:
        factor = as_ring_array(constant)
    else:
        factor = to_signed(encode_array(constant, cfg), cfg)

    def local(pid: Server, share: LocalShare) -> LocalShare:
        first = reduce(np.asarray(share.first * factor, dtype=object), cfg)
        second = reduce(np.asarray(share.second * factor, dtype=object), cfg)
        if not integral:
            first, second = truncate_pair(pid, first, second, cfg)
        return LocalShare(np.broadcast_to(first, shape), np.broadcast_to(second, shape))

    return x.engine.local(local, (x,), shape)
