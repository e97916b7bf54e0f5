"""
Référence en clair des opérations dérivées, en virgule fixe.

``FixedRef`` applique les mêmes règles d'encodage que le moteur (arrondi
vers -inf, constantes entières multipliées exactement) mais tronque chaque
produit par défaut. Les méthodes itératives exécutent les noyaux de
``derived.kernels`` : la suite d'opérations est celle du protocole.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from ring.arithmetic import (
    RingConfig,
    as_ring_array,
    decode_array,
    encode_array,
    reduce,
    to_signed,
)
from ring.exceptions import RingOverflowError
from tensor.exceptions import EmptyAxisError, ShapeError
from tensor.shape import normalize_axis

from . import kernels
from .params import EXP, LOG, LOGISTIC, RECIPROCAL, SQRT, IterParams


class FixedRef:
    """Tableau d'entiers signés de l'anneau, interprétés à 2^-d près."""

    __array_ufunc__ = None

    def __init__(self, raw: Any, config: RingConfig) -> None:
        raw = np.asarray(raw, dtype=object)
        if raw.size and bool(np.any(np.abs(raw) >= config.half)):
            raise RingOverflowError("Débordement de la référence en virgule fixe")
        self.raw = raw
        self.config = config

    @classmethod
    def encode(cls, values: Any, config: RingConfig) -> FixedRef:
        return cls(to_signed(encode_array(values, config), config), config)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.raw.shape)

    def values(self) -> np.ndarray:
        return decode_array(reduce(self.raw, self.config), self.config)

    def _constant(self, value: Any) -> np.ndarray:
        return to_signed(encode_array(value, self.config), self.config)

    def _new(self, raw: Any) -> FixedRef:
        return FixedRef(raw, self.config)

    def __add__(self, other: Any) -> FixedRef:
        if isinstance(other, FixedRef):
            return self._new(self.raw + other.raw)
        return self._new(self.raw + self._constant(other))

    __radd__ = __add__

    def __sub__(self, other: Any) -> FixedRef:
        if isinstance(other, FixedRef):
            return self._new(self.raw - other.raw)
        return self._new(self.raw + self._constant(-np.asarray(other, np.float64)))

    def __rsub__(self, other: Any) -> FixedRef:
        return self._new(-self.raw + self._constant(other))

    def __neg__(self) -> FixedRef:
        return self._new(-self.raw)

    def __mul__(self, other: Any) -> FixedRef:
        d = self.config.d
        if isinstance(other, FixedRef):
            return self._new(np.right_shift(self.raw * other.raw, d))
        constant = np.asarray(other, dtype=np.float64)
        if bool(np.all(constant == np.round(constant))):
            return self._new(self.raw * as_ring_array(constant))
        return self._new(np.right_shift(self.raw * self._constant(constant), d))

    __rmul__ = __mul__

    def clip(self, lower: Any, upper: Any) -> FixedRef:
        # Bornes effectives du protocole clip : -enc(-lower) et enc(upper).
        lo = -self._constant(-np.asarray(lower, np.float64))
        hi = self._constant(upper)
        return self._new(np.minimum(np.maximum(self.raw, lo), hi))

    def __repr__(self) -> str:
        return f"FixedRef(shape={self.shape}, d={self.config.d})"


# Opérations exactes -----------------------------------------------------------


def relu(x: FixedRef) -> FixedRef:
    return x._new(np.maximum(x.raw, 0))


def abs_(x: FixedRef) -> FixedRef:
    return x._new(np.abs(x.raw))


def logistic_piecewise(x: FixedRef) -> FixedRef:
    return (x + 0.5).clip(0.0, 1.0)


def _along_last(x: FixedRef, axis: int | None) -> np.ndarray:
    raw = x.raw.reshape(-1) if axis is None else x.raw
    axis = -1 if axis is None else normalize_axis(axis, raw.ndim)
    if raw.shape[axis] == 0:
        raise EmptyAxisError("Réduction sur un axe vide")
    return np.moveaxis(raw, axis, -1)


def max_(x: FixedRef, axis: int | None = None) -> FixedRef:
    return x._new(np.max(_along_last(x, axis), axis=-1))


def min_(x: FixedRef, axis: int | None = None) -> FixedRef:
    return x._new(np.min(_along_last(x, axis), axis=-1))


def argmax(x: FixedRef, axis: int | None = None) -> np.ndarray:
    """Premier indice du maximum."""
    return np.argmax(_along_last(x, axis), axis=-1)


def argmin(x: FixedRef, axis: int | None = None) -> np.ndarray:
    return np.argmin(_along_last(x, axis), axis=-1)


def max_pool2d(x: FixedRef, size: tuple[int, int] = (2, 2)) -> FixedRef:
    kh, kw = size
    *lead, h, w = x.shape
    if h % kh or w % kw:
        raise ShapeError(f"Fenêtre {size} incompatible avec {(h, w)}")
    windows = x.raw.reshape(*lead, h // kh, kh, w // kw, kw)
    windows = np.moveaxis(windows, -3, -2).reshape(*lead, h // kh, w // kw, kh * kw)
    return x._new(np.max(windows, axis=-1))


# Méthodes itératives --------------------------------------------------------


def logistic(x: FixedRef, params: IterParams = LOGISTIC) -> FixedRef:
    return kernels.euler_logistic(x.clip(params.lower, params.upper), params)


def reciprocal(x: FixedRef, params: IterParams = RECIPROCAL) -> FixedRef:
    kernels.check_reciprocal(params, x.config)
    return kernels.newton_reciprocal(x, params)


def divide(y: FixedRef, x: FixedRef, params: IterParams = RECIPROCAL) -> FixedRef:
    return y * reciprocal(x, params)


def sqrt(x: FixedRef, params: IterParams = SQRT) -> FixedRef:
    kernels.check_sqrt(params, x.config)
    return kernels.newton_sqrt(x, params)


def exp(x: FixedRef, params: IterParams = EXP) -> FixedRef:
    kernels.check_exp(params, x.config)
    return kernels.exp_by_squaring(x, params.iter_cnt)


def log(x: FixedRef, params: IterParams = LOG) -> FixedRef:
    kernels.check_log(params, x.config)
    return kernels.newton_log(x, params)
