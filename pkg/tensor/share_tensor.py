"""
Poignée vers un tableau de partages réparti sur les quatre serveurs.
"""

from __future__ import annotations

import weakref
from typing import TYPE_CHECKING, Any

import numpy as np

from ring.arithmetic import RingConfig
from sharing.shares import ShareKind

from .shape import Shape, size

if TYPE_CHECKING:
    from sharing.engine import Engine


def _is_share(value: Any) -> bool:
    return isinstance(value, ShareTensor)


class ShareTensor:
    """Tableau N-dimensionnel de partages (arithmétiques ou de bits).

    La poignée ne contient aucune composante : chaque serveur stocke la
    sienne sous ``tid``. Le stockage est libéré quand la poignée disparaît.
    """

    # Les opérateurs avec un ndarray à gauche reviennent vers nous.
    __array_ufunc__ = None

    def __init__(self, engine: Engine, tid: int, shape: Shape, kind: ShareKind) -> None:
        self.engine = engine
        self.tid = tid
        self.shape = shape
        self.kind = kind
        weakref.finalize(self, engine.release, tid)

    # Métadonnées ----------------------------------------------------------

    @property
    def config(self) -> RingConfig:
        return self.engine.config

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return size(self.shape)

    @property
    def is_bit(self) -> bool:
        return self.kind is ShareKind.BIT

    def __len__(self) -> int:
        if not self.shape:
            raise TypeError("Un tenseur scalaire n'a pas de longueur")
        return self.shape[0]

    def __repr__(self) -> str:
        return f"ShareTensor(#{self.tid}, shape={self.shape}, kind={self.kind})"

    # Arithmétique ---------------------------------------------------------

    def __add__(self, other: Any) -> ShareTensor:
        from sharing.algebra import add_public, add_shares

        if _is_share(other):
            return add_shares(self, other)
        return add_public(self, other)

    __radd__ = __add__

    def __sub__(self, other: Any) -> ShareTensor:
        from sharing.algebra import sub, sub_public

        if _is_share(other):
            return sub(self, other)
        return sub_public(self, other)

    def __rsub__(self, other: Any) -> ShareTensor:
        from sharing.algebra import rsub_public

        return rsub_public(other, self)

    def __neg__(self) -> ShareTensor:
        from sharing.algebra import negate

        return negate(self)

    def __mul__(self, other: Any) -> ShareTensor:
        from protocols.multiplication import mul_fixed, mul_public

        if _is_share(other):
            return mul_fixed(self, other)
        return mul_public(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> ShareTensor:
        from protocols.multiplication import mul_public

        if _is_share(other):
            from derived.numerics import divide

            return divide(self, other)
        return mul_public(self, 1.0 / np.asarray(other, dtype=np.float64))

    def __rtruediv__(self, other: Any) -> ShareTensor:
        from derived.numerics import divide

        return divide(other, self)

    def __matmul__(self, other: ShareTensor) -> ShareTensor:
        from .ops import dot

        return dot(self, other)

    def __lt__(self, other: Any) -> ShareTensor:
        from protocols.comparison import less_than

        return less_than(self, other)

    def __gt__(self, other: Any) -> ShareTensor:
        from protocols.comparison import greater_than

        return greater_than(self, other)

    # Opérations sur les bits ----------------------------------------------

    def __xor__(self, other: Any) -> ShareTensor:
        from protocols.bitwise import bit_xor

        return bit_xor(self, other)

    def __and__(self, other: ShareTensor) -> ShareTensor:
        from protocols.bitwise import bit_and

        return bit_and(self, other)

    def __invert__(self) -> ShareTensor:
        from protocols.bitwise import bit_not

        return bit_not(self)

    # Indexation et méthodes ndarray ---------------------------------------

    def __getitem__(self, key: Any) -> ShareTensor:
        from .ops import getitem

        return getitem(self, key)

    @property
    def T(self) -> ShareTensor:  # noqa: N802
        return self.transpose()

    def reshape(self, *shape: Any) -> ShareTensor:
        from .ops import reshape

        return reshape(self, shape[0] if len(shape) == 1 else shape)

    def transpose(self, *axes: int) -> ShareTensor:
        from .ops import transpose

        return transpose(self, axes or None)

    def flatten(self) -> ShareTensor:
        from .ops import flatten

        return flatten(self)

    def repeat(self, repeats: int, axis: int | None = None) -> ShareTensor:
        from .ops import repeat

        return repeat(self, repeats, axis)

    def tile(self, reps: Any) -> ShareTensor:
        from .ops import tile

        return tile(self, reps)

    def sum(self, axis: int | None = None) -> ShareTensor:
        from .ops import sum_

        return sum_(self, axis)

    def mean(self, axis: int | None = None) -> ShareTensor:
        from .ops import mean

        return mean(self, axis)

    def dot(self, other: ShareTensor) -> ShareTensor:
        from .ops import dot

        return dot(self, other)

    def max(self, axis: int | None = None) -> ShareTensor:
        from derived.selection import max_

        return max_(self, axis)

    def min(self, axis: int | None = None) -> ShareTensor:
        from derived.selection import min_

        return min_(self, axis)

    def argmax(self, axis: int | None = None) -> ShareTensor:
        from derived.selection import argmax

        return argmax(self, axis)

    def argmin(self, axis: int | None = None) -> ShareTensor:
        from derived.selection import argmin

        return argmin(self, axis)

    def clip(self, lower: Any, upper: Any) -> ShareTensor:
        from protocols.comparison import clip

        return clip(self, lower, upper)

    def reveal(self, to: tuple[Any, ...] | None = None) -> np.ndarray:
        """Révèle le tenseur aux destinataires (par défaut le client 0)."""
        return self.engine.reveal(self, to)
