"""
Formes et règle de diffusion.
"""

from __future__ import annotations

import math
from collections.abc import Iterable

from .exceptions import ShapeError

Shape = tuple[int, ...]


def as_shape(dims: Iterable[int] | int) -> Shape:
    """Normalise une forme ; ``()`` désigne un scalaire."""
    if isinstance(dims, int):
        dims = (dims,)
    shape = tuple(int(d) for d in dims)
    if any(d < 0 for d in shape):
        raise ShapeError(f"Dimension négative dans {shape}")
    return shape


def size(shape: Shape) -> int:
    return math.prod(shape)


def broadcast(a: Shape, b: Shape) -> Shape:
    """Forme du résultat élément par élément (règle des dimensions finales)."""
    ndim = max(len(a), len(b))
    padded_a = (1,) * (ndim - len(a)) + tuple(a)
    padded_b = (1,) * (ndim - len(b)) + tuple(b)
    result = []
    for axis, (i, j) in enumerate(zip(padded_a, padded_b, strict=True)):
        if i != j and i != 1 and j != 1:
            raise ShapeError(
                f"Diffusion impossible entre {a} et {b} (axe {axis} : {i} contre {j})",
                axis=axis,
            )
        result.append(j if i == 1 else i)
    return tuple(result)


def broadcast_all(*shapes: Shape) -> Shape:
    result: Shape = ()
    for shape in shapes:
        result = broadcast(result, shape)
    return result


def normalize_axis(axis: int, ndim: int) -> int:
    if not -ndim <= axis < ndim:
        raise ShapeError(f"Axe {axis} hors limites pour {ndim} dimensions", axis=axis)
    return axis % ndim
