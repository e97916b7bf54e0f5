"""
Maximum, minimum et leurs indices par tournoi ; max-pooling.

Chaque niveau du tournoi compare toutes les paires d'un coup (une
extraction de bit) puis sélectionne valeurs et indices par un seul OT.
À égalité, l'élément d'indice le plus petit l'emporte.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import structlog

from protocols.comparison import less_than
from protocols.multiplication import require_arithmetic
from protocols.ot import ot_select
from sharing.oracle import private_operation
from tensor.exceptions import EmptyAxisError, ShapeError
from tensor.ops import concatenate, flatten, reshape, stack, transpose
from tensor.shape import normalize_axis

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor

logger = structlog.get_logger(__name__)


def _along_last(x: ShareTensor, axis: int | None) -> ShareTensor:
    """Place l'axe réduit en dernière position."""
    if axis is None:
        x, axis = flatten(x), 0
    axis = normalize_axis(axis, x.ndim)
    if x.shape[axis] == 0:
        raise EmptyAxisError(f"Réduction sur l'axe vide {axis} de {x.shape}")
    order = [i for i in range(x.ndim) if i != axis] + [axis]
    if order == list(range(x.ndim)):
        return x
    return transpose(x, order)


def _tournament(
    x: ShareTensor, axis: int | None, with_index: bool
) -> tuple[ShareTensor, ShareTensor | None]:
    require_arithmetic(x)
    values = _along_last(x, axis)
    index: ShareTensor | None = None
    if with_index:
        positions = np.arange(values.shape[-1], dtype=np.float64)
        index = x.engine.public(np.broadcast_to(positions, values.shape))
    while values.shape[-1] > 1:
        width = values.shape[-1]
        paired = 2 * (width // 2)
        low, high = values[..., 0:paired:2], values[..., 1:paired:2]
        take_high = less_than(low, high)
        if index is None:
            merged = low + ot_select(take_high, high - low)
            merged_index: ShareTensor | None = None
        else:
            index_low, index_high = index[..., 0:paired:2], index[..., 1:paired:2]
            picked = ot_select(take_high, stack([high - low, index_high - index_low]))
            merged = low + picked[0]
            merged_index = index_low + picked[1]
        if width % 2:
            merged = concatenate([merged, values[..., paired:]], axis=-1)
            if merged_index is not None and index is not None:
                merged_index = concatenate([merged_index, index[..., paired:]], axis=-1)
        values, index = merged, merged_index
        logger.debug("tournament.level", remaining=values.shape[-1])
    return values[..., 0], None if index is None else index[..., 0]


@private_operation("max")
def max_(x: ShareTensor, axis: int | None = None) -> ShareTensor:
    return _tournament(x, axis, with_index=False)[0]


@private_operation("min")
def min_(x: ShareTensor, axis: int | None = None) -> ShareTensor:
    return -_tournament(-x, axis, with_index=False)[0]


@private_operation("argmax")
def argmax(x: ShareTensor, axis: int | None = None) -> ShareTensor:
    """Indice partagé (encodé en virgule fixe) du premier maximum."""
    index = _tournament(x, axis, with_index=True)[1]
    assert index is not None
    return index


@private_operation("argmin")
def argmin(x: ShareTensor, axis: int | None = None) -> ShareTensor:
    index = _tournament(-x, axis, with_index=True)[1]
    assert index is not None
    return index


@private_operation("max_pool2d")
def max_pool2d(x: ShareTensor, size: tuple[int, int] = (2, 2)) -> ShareTensor:
    """Max-pooling sans recouvrement sur les deux derniers axes."""
    kh, kw = size
    if x.ndim < 2:
        raise ShapeError(f"max_pool2d attend au moins 2 dimensions, pas {x.shape}")
    *lead, h, w = x.shape
    if kh < 1 or kw < 1 or h % kh or w % kw:
        raise ShapeError(f"Fenêtre {size} incompatible avec {(h, w)}")
    windows = reshape(x, (*lead, h // kh, kh, w // kw, kw))
    nd = windows.ndim
    order = [*range(nd - 4), nd - 4, nd - 2, nd - 3, nd - 1]
    windows = reshape(transpose(windows, order), (*lead, h // kh, w // kw, kh * kw))
    return max_(windows, axis=-1)
