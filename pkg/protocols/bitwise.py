"""
Opérations sur les partages de bits (Z_2).
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np

from sharing.algebra import add_public, add_shares
from sharing.oracle import private_operation
from sharing.shares import LocalShare, ShareKind
from tensor.shape import broadcast

from .multiplication import product_round

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor


def _require_bits(*tensors: ShareTensor) -> None:
    for tensor in tensors:
        if tensor.kind is not ShareKind.BIT:
            raise TypeError("Opération réservée aux partages de bits")


def bit_xor(a: ShareTensor, b: Any) -> ShareTensor:
    """XOR local, avec un autre partage ou une constante publique."""
    from tensor.share_tensor import ShareTensor

    _require_bits(a)
    if isinstance(b, ShareTensor):
        _require_bits(b)
        return add_shares(a, b)
    return add_public(a, b)


def bit_not(a: ShareTensor) -> ShareTensor:
    _require_bits(a)
    return add_public(a, np.uint8(1))


def _and_terms(x: LocalShare, y: LocalShare) -> tuple[np.ndarray, np.ndarray]:
    return np.bitwise_and(x.first, y.second), np.bitwise_and(x.second, y.first)


@private_operation("bit_and")
def bit_and(a: ShareTensor, b: ShareTensor) -> ShareTensor:
    """ET de deux partages de bits : ronde de la multiplication, sans troncature."""
    _require_bits(a, b)
    return product_round(
        (a, b),
        _and_terms,
        broadcast(a.shape, b.shape),
        kind=ShareKind.BIT,
        truncate=False,
        op="bit_and",
    )
