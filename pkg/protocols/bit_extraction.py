"""
Extraction du k-ième bit d'un partage arithmétique.

Les composantes x1 et x2 sont vues comme deux tableaux de bits additionnés
par un circuit d'addition. Deux variantes :

* ``extract_bit`` enchaîne les additionneurs 1 bit (k - 1 rondes de retenue) ;
* ``extract_bit_ppa`` calcule la retenue par un arbre préfixe parallèle
  (profondeur logarithmique en k).

Les bits sont numérotés à partir de 1 (bit de poids faible).
"""

from __future__ import annotations

from collections.abc import Callable
from typing import TYPE_CHECKING, Any

import numpy as np

from sharing.context import ServerContext
from sharing.oracle import private_operation
from sharing.parties import Server
from sharing.shares import LocalShare, ShareKind

from .bitwise import bit_and, bit_xor
from .routing import MASK_PEER

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor

# Échange des retenues : S1 <-> Sa, S2 <-> Sb.
CARRY_PARTNER: dict[Server, Server] = {
    Server.S1: Server.SA,
    Server.SA: Server.S1,
    Server.S2: Server.SB,
    Server.SB: Server.S2,
}

# Dernière ronde : destinataire du bit de somme masqué.
SUM_ROUTES: dict[Server, Server] = {
    Server.S1: Server.SA,
    Server.S2: Server.SB,
    Server.SA: Server.S2,
    Server.SB: Server.S1,
}
SUM_SENDERS: dict[Server, Server] = {dest: src for src, dest in SUM_ROUTES.items()}

# Sa et Sb gardent leur propre bit en première composante.
KEEPS_FIRST: frozenset[Server] = frozenset({Server.SA, Server.SB})


def bit_planes(raw: Any, k: int) -> np.ndarray:
    """Les ``k`` bits de poids faible, sur un nouvel axe final (uint8)."""
    values = np.asarray(raw, dtype=object)
    planes = [
        np.asarray(np.bitwise_and(np.right_shift(values, j), 1)).astype(np.uint8)
        for j in range(k)
    ]
    return np.stack(planes, axis=-1)


def _draw_bits(ctx: ServerContext, peer: Server, shape: tuple[int, ...]) -> np.ndarray:
    # Un tirage vide ne consomme pas le flux : les deux côtés restent alignés.
    if not int(np.prod(shape)):
        return np.zeros(shape, dtype=np.uint8)
    return ctx.draw(peer, shape, ShareKind.BIT)


def _check_index(x: ShareTensor, k: int) -> None:
    if x.kind is not ShareKind.ARITHMETIC:
        raise TypeError("L'extraction de bit attend un partage arithmétique")
    if not 1 <= k <= x.config.n:
        raise ValueError(f"k doit être dans [1, {x.config.n}] (reçu {k})")


@private_operation("extract_bit")
def extract_bit(x: ShareTensor, k: int) -> ShareTensor:
    """Bit ``k`` de x1 + x2 mod 2^n, additionneurs 1 bit chaînés.

    k + 1 rondes (1 si k = 1). S1 envoie 2k - 1 bits par élément, les
    autres serveurs k bits. En mode demi-partage, Sb prend en charge la
    moitié du masquage initial et aucun serveur n'envoie plus de 1,5k bits.
    """
    _check_index(x, k)
    engine = x.engine
    shape = x.shape
    carries = k - 1
    split = carries // 2 if engine.half_sharing else carries
    out = engine.allocate(shape, ShareKind.BIT)
    tag = engine.tag("bit")

    # Masquage de x1[1:k-1] ∧ x2[1:k-1] : u2 (S2) ⊕ ua (Sa) = x1 ∧ x2.
    def setup(ctx: ServerContext) -> None:
        pid = ctx.pid
        assert isinstance(pid, Server)
        planes = bit_planes(ctx.load(x).first, k)
        state: dict[str, Any] = {"x": planes, "c": np.zeros(shape, dtype=np.uint8)}
        low = planes[..., :split]
        high = planes[..., split:carries]
        if pid is Server.S1 and low.size:
            u1 = low ^ _draw_bits(ctx, Server.S2, low.shape)
            ctx.send_bits(Server.SA, f"{tag}:u1", u1)
        elif pid is Server.SB and high.size:
            ub = high ^ _draw_bits(ctx, Server.S2, high.shape)
            ctx.send_bits(Server.SA, f"{tag}:ub", ub)
        elif pid is Server.S2:
            r = np.concatenate(
                [
                    _draw_bits(ctx, Server.S1, low.shape),
                    _draw_bits(ctx, Server.SB, high.shape),
                ],
                axis=-1,
            )
            state["u"] = planes[..., :carries] & r
            ctx.record(tag, "u2", state["u"])
        ctx.scratch[tag] = state

    engine.each_server(setup)

    def receive_masked(ctx: ServerContext, state: dict[str, Any]) -> None:
        parts = []
        if split:
            parts.append(ctx.recv_bits(Server.S1, f"{tag}:u1", shape + (split,)))
        if carries > split:
            parts.append(
                ctx.recv_bits(Server.SB, f"{tag}:ub", shape + (carries - split,))
            )
        u1 = np.concatenate(parts, axis=-1)
        state["u"] = u1 & state["x"][..., :carries]
        ctx.record(tag, "ua", state["u"])

    def absorb(ctx: ServerContext, state: dict[str, Any], i: int) -> None:
        """Nouvelle retenue c' = t' ⊕ t' du partenaire (itération ``i``)."""
        partner = CARRY_PARTNER[Server(ctx.pid)]
        received = ctx.recv_bits(partner, f"{tag}:t{i}", shape)
        state["c"] = state.pop("t") ^ received

    # Itération i (1 <= i <= k - 1) : t' = x[i] ∧ c' ⊕ u[i] ⊕ b.
    def carry_step(i: int) -> Callable[[ServerContext], None]:
        def step(ctx: ServerContext) -> None:
            pid = Server(ctx.pid)
            state = ctx.scratch[tag]
            if i == 1 and pid is Server.SA:
                receive_masked(ctx, state)
            if i > 1:
                absorb(ctx, state, i - 1)
            t = state["x"][..., i - 1] & state["c"]
            if "u" in state:
                t = t ^ state["u"][..., i - 1]
            t = t ^ _draw_bits(ctx, MASK_PEER[pid], shape)
            ctx.record(tag, f"t{i}'", t)
            state["t"] = t
            ctx.send_bits(CARRY_PARTNER[pid], f"{tag}:t{i}", t)

        return step

    for i in range(1, k):
        engine.each_server(carry_step(i))

    # Bit de somme : x[k] ⊕ c' ⊕ b, repartagé en une ronde.
    def sum_step(ctx: ServerContext) -> None:
        pid = Server(ctx.pid)
        state = ctx.scratch[tag]
        if carries:
            absorb(ctx, state, carries)
        mask = _draw_bits(ctx, MASK_PEER[pid], shape)
        s = state["x"][..., k - 1] ^ state["c"] ^ mask
        state["s"] = s
        ctx.send_bits(SUM_ROUTES[pid], f"{tag}:s", s)

    engine.each_server(sum_step)

    def finish(ctx: ServerContext) -> None:
        pid = Server(ctx.pid)
        own = ctx.scratch.pop(tag)["s"]
        other = ctx.recv_bits(SUM_SENDERS[pid], f"{tag}:s", shape)
        if pid in KEEPS_FIRST:
            ctx.store(out, LocalShare(own, other))
        else:
            ctx.store(out, LocalShare(other, own))

    engine.each_server(finish)
    return out


# Variante à préfixe parallèle ------------------------------------------------


def _split_bits(x: ShareTensor, k: int) -> tuple[ShareTensor, ShareTensor]:
    """Partages de bits des vecteurs x1[1:k] et x2[1:k] (une ronde).

    S1 masque x1 avec la graine {S1, Sa} et l'envoie à S2 et Sb ; S2 masque
    x2 avec la graine {S2, Sb} et l'envoie à S1 et Sa.
    """
    engine = x.engine
    shape = x.shape + (k,)
    first = engine.allocate(shape, ShareKind.BIT)
    second = engine.allocate(shape, ShareKind.BIT)
    tag = engine.tag("a2b")
    zero = np.zeros(shape, dtype=np.uint8)

    def send(ctx: ServerContext) -> None:
        pid = Server(ctx.pid)
        planes = bit_planes(ctx.load(x).first, k)
        state: dict[str, Any] = {"x": planes}
        if pid is Server.S1:
            state["r"] = ctx.draw(Server.SA, shape, ShareKind.BIT)
            masked = planes ^ state["r"]
            ctx.send_bits(Server.S2, f"{tag}:x1", masked)
            ctx.send_bits(Server.SB, f"{tag}:x1", masked)
        elif pid is Server.S2:
            state["s"] = ctx.draw(Server.SB, shape, ShareKind.BIT)
            masked = planes ^ state["s"]
            ctx.send_bits(Server.S1, f"{tag}:x2", masked)
            ctx.send_bits(Server.SA, f"{tag}:x2", masked)
        elif pid is Server.SA:
            state["r"] = ctx.draw(Server.S1, shape, ShareKind.BIT)
        else:
            state["s"] = ctx.draw(Server.S2, shape, ShareKind.BIT)
        ctx.scratch[tag] = state

    engine.each_server(send)

    def receive(ctx: ServerContext) -> None:
        pid = Server(ctx.pid)
        state = ctx.scratch.pop(tag)
        planes = state["x"]
        if pid is Server.S1:
            masked_x2 = ctx.recv_bits(Server.S2, f"{tag}:x2", shape)
            ctx.store(first, LocalShare(planes, state["r"]))
            ctx.store(second, LocalShare(zero, masked_x2))
        elif pid is Server.S2:
            masked_x1 = ctx.recv_bits(Server.S1, f"{tag}:x1", shape)
            ctx.store(first, LocalShare(zero, masked_x1))
            ctx.store(second, LocalShare(planes, state["s"]))
        elif pid is Server.SA:
            masked_x2 = ctx.recv_bits(Server.S2, f"{tag}:x2", shape)
            ctx.store(first, LocalShare(zero, state["r"]))
            ctx.store(second, LocalShare(planes, masked_x2))
        else:
            masked_x1 = ctx.recv_bits(Server.S1, f"{tag}:x1", shape)
            ctx.store(first, LocalShare(planes, masked_x1))
            ctx.store(second, LocalShare(zero, state["s"]))

    engine.each_server(receive)
    return first, second


def _prefix_carry(g: ShareTensor, p: ShareTensor) -> ShareTensor:
    """Retenue sortante d'un groupe de positions (g, p) sur l'axe final.

    (G, P)_haut ∘ (G, P)_bas = (G_h ⊕ P_h ∧ G_b, P_h ∧ P_b), les deux ET
    d'un même niveau étant groupés dans une seule ronde.
    """
    from tensor.ops import concatenate

    while g.shape[-1] > 1:
        m = g.shape[-1]
        half = m // 2
        g_lo, g_hi = g[..., 0 : 2 * half : 2], g[..., 1 : 2 * half : 2]
        p_lo, p_hi = p[..., 0 : 2 * half : 2], p[..., 1 : 2 * half : 2]
        if m > 2:
            products = bit_and(
                concatenate([p_hi, p_hi], axis=-1), concatenate([g_lo, p_lo], axis=-1)
            )
            g_next = bit_xor(g_hi, products[..., :half])
            p_next = products[..., half:]
        else:
            g_next = bit_xor(g_hi, bit_and(p_hi, g_lo))
            p_next = p_hi
        if m % 2:
            g_next = concatenate([g_next, g[..., m - 1 :]], axis=-1)
            p_next = concatenate([p_next, p[..., m - 1 :]], axis=-1)
        g, p = g_next, p_next
    return g[..., 0]


@private_operation("extract_bit_ppa")
def extract_bit_ppa(x: ShareTensor, k: int) -> ShareTensor:
    """Même résultat que ``extract_bit`` en 2 + ⌈log2(k - 1)⌉ rondes."""
    _check_index(x, k)
    x1, x2 = _split_bits(x, k)
    top = bit_xor(x1[..., k - 1], x2[..., k - 1])
    if k == 1:
        return top
    low1, low2 = x1[..., : k - 1], x2[..., : k - 1]
    carry = _prefix_carry(bit_and(low1, low2), bit_xor(low1, low2))
    return bit_xor(top, carry)


def extract(x: ShareTensor, k: int) -> ShareTensor:
    """Extraction selon l'option de l'engine (ripple ou préfixe parallèle)."""
    if x.engine.ppa:
        return extract_bit_ppa(x, k)
    return extract_bit(x, k)


def msb(x: ShareTensor) -> ShareTensor:
    """Bit de signe : 1 si x est négatif."""
    return extract(x, x.config.n)
