"""
Comparaisons par extraction du bit de signe de la différence.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np

from sharing.oracle import private_operation
from tensor.shape import broadcast_all

from .bit_extraction import msb
from .ot import ot_select

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor


def _difference(x: Any, y: Any) -> ShareTensor:
    from tensor.share_tensor import ShareTensor

    if not isinstance(x, ShareTensor) and not isinstance(y, ShareTensor):
        raise TypeError("Au moins un opérande doit être un partage")
    for operand in (x, y):
        if isinstance(operand, ShareTensor) and operand.is_bit:
            raise TypeError("La comparaison attend des partages arithmétiques")
    diff = x - y
    assert isinstance(diff, ShareTensor)
    return diff


@private_operation("less_than")
def less_than(x: Any, y: Any) -> ShareTensor:
    """Bit partagé valant 1 si x < y (MSB de x - y)."""
    return msb(_difference(x, y))


@private_operation("greater_than")
def greater_than(x: Any, y: Any) -> ShareTensor:
    return msb(_difference(y, x))


@private_operation("clip")
def clip(x: ShareTensor, lower: Any, upper: Any) -> ShareTensor:
    """Borne x dans [lower, upper] (bornes publiques).

    Les deux comparaisons partagent une seule extraction et les deux
    corrections un seul OT.
    """
    from tensor.ops import broadcast_to, stack

    lo = np.asarray(lower, dtype=np.float64)
    hi = np.asarray(upper, dtype=np.float64)
    if np.any(lo > hi):
        raise ValueError("clip : la borne inférieure dépasse la borne supérieure")
    shape = broadcast_all(x.shape, lo.shape, hi.shape)
    below = broadcast_to(x - lo, shape)
    above = broadcast_to(hi - x, shape)
    outside = msb(stack([below, above]))
    corrections = ot_select(outside, stack([-below, above]))
    return x + corrections[0] + corrections[1]
