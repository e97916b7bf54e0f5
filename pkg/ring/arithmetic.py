"""
Arithmétique exacte dans Z_{2^n} et encodage en virgule fixe.

Les fonctions scalaires (``add``, ``mul``...) et leurs versions vectorisées
(``reduce``, ``shift_right``...) partagent le même code : les tableaux sont des
``numpy.ndarray`` de dtype ``object`` contenant des entiers Python, ce qui
permet de travailler sur 128 bits sans perte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

import numpy as np

from .exceptions import RingOverflowError

MAX_RING_BITS = 128

_to_int = np.frompyfunc(int, 1, 1)


@dataclass(frozen=True)
class RingConfig:
    """Paramètres de l'anneau : ``n`` bits, dont ``d`` bits fractionnaires."""

    n: int = 128
    d: int = 40

    def __post_init__(self) -> None:
        if not 0 < self.n <= MAX_RING_BITS:
            raise ValueError(f"n doit être dans ]0, {MAX_RING_BITS}] (reçu {self.n})")
        if not 0 < self.d < self.n:
            raise ValueError(f"d doit vérifier 0 < d < n (reçu d={self.d})")

    @cached_property
    def modulus(self) -> int:
        return 1 << self.n

    @cached_property
    def mask(self) -> int:
        return self.modulus - 1

    @cached_property
    def half(self) -> int:
        return 1 << (self.n - 1)

    @cached_property
    def scale(self) -> int:
        return 1 << self.d

    @cached_property
    def element_bytes(self) -> int:
        """Taille sérialisée d'un élément de l'anneau."""
        return (self.n + 7) // 8

    @cached_property
    def max_magnitude(self) -> float:
        """Borne stricte des réels encodables : 2^(n-1-d)."""
        return math.ldexp(1.0, self.n - 1 - self.d)


@dataclass(frozen=True)
class RingValue:
    """Élément de Z_{2^n}, interprété en complément à deux."""

    value: int
    config: RingConfig

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.config.modulus:
            raise ValueError("La valeur doit être réduite modulo 2^n")

    @classmethod
    def of(cls, value: int, config: RingConfig) -> RingValue:
        """Construit un élément en réduisant ``value`` modulo 2^n."""
        return cls(value & config.mask, config)

    @property
    def signed(self) -> int:
        if self.value >= self.config.half:
            return self.value - self.config.modulus
        return self.value

    def __add__(self, other: RingValue) -> RingValue:
        return add(self, other)

    def __sub__(self, other: RingValue) -> RingValue:
        return add(self, RingValue.of(-other.value, other.config))

    def __mul__(self, other: RingValue) -> RingValue:
        return mul(self, other)

    def __neg__(self) -> RingValue:
        return RingValue.of(-self.value, self.config)

    def __rshift__(self, bits: int) -> RingValue:
        return arith_shift_right(self, bits)


@dataclass(frozen=True)
class FixedPoint:
    """Réel encodé ``⌊v·2^d⌋`` dans l'anneau."""

    raw: RingValue

    @property
    def config(self) -> RingConfig:
        return self.raw.config

    def __float__(self) -> float:
        return decode_fixed(self)


def _check_same(a: RingValue, b: RingValue) -> None:
    if a.config != b.config:
        raise ValueError("Les deux opérandes doivent partager la même RingConfig")


def add(a: RingValue, b: RingValue) -> RingValue:
    """Addition modulo 2^n."""
    _check_same(a, b)
    return RingValue.of(a.value + b.value, a.config)


def mul(a: RingValue, b: RingValue) -> RingValue:
    """Multiplication modulo 2^n."""
    _check_same(a, b)
    return RingValue.of(a.value * b.value, a.config)


def arith_shift_right(a: RingValue, d: int) -> RingValue:
    """Décalage arithmétique (extension de signe) de ``d`` bits."""
    if not 0 <= d < a.config.n:
        raise ValueError(f"Décalage hors limites : {d}")
    return RingValue.of(a.signed >> d, a.config)


def encode_fixed(v: Any, cfg: RingConfig) -> FixedPoint:
    """Encode un réel en ``⌊v·2^d⌋ mod 2^n`` (arrondi vers -inf)."""
    try:
        exact = Fraction(v)
    except (ValueError, OverflowError) as exc:
        raise RingOverflowError(f"Valeur non encodable : {v!r}") from exc
    if abs(exact) >= Fraction(1 << (cfg.n - 1 - cfg.d)):
        raise RingOverflowError(
            f"|{v}| dépasse 2^{cfg.n - 1 - cfg.d} pour n={cfg.n}, d={cfg.d}"
        )
    return FixedPoint(RingValue.of(math.floor(exact * cfg.scale), cfg))


def decode_fixed(f: FixedPoint) -> float:
    """Décode vers un réel : ``signed(raw) / 2^d``."""
    return f.raw.signed / f.config.scale


# Versions vectorisées ------------------------------------------------------


def as_ring_array(values: Any) -> np.ndarray:
    """Convertit des entiers quelconques en tableau ``object`` d'entiers Python."""
    arr = np.asarray(values)
    if arr.dtype == object:
        return arr
    if arr.ndim:
        return _to_int(arr).astype(object)
    return np.asarray(int(arr), dtype=object)


def reduce(a: np.ndarray, cfg: RingConfig) -> np.ndarray:
    """Réduit chaque élément modulo 2^n."""
    return np.asarray(np.bitwise_and(a, cfg.mask), dtype=object)


def to_signed(a: np.ndarray, cfg: RingConfig) -> np.ndarray:
    """Interprétation en complément à deux d'un tableau réduit."""
    a = np.asarray(a, dtype=object)
    return np.where(a >= cfg.half, a - cfg.modulus, a).astype(object)


def shift_right(a: np.ndarray, bits: int, cfg: RingConfig) -> np.ndarray:
    """Décalage arithmétique élément par élément."""
    return reduce(np.right_shift(to_signed(a, cfg), bits), cfg)


def encode_array(values: Any, cfg: RingConfig) -> np.ndarray:
    """Encode un tableau de réels ; lève ``RingOverflowError`` hors plage."""
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise RingOverflowError("Valeurs non finies impossibles à encoder")
    if arr.size and float(np.max(np.abs(arr))) >= cfg.max_magnitude:
        raise RingOverflowError(
            f"Valeurs hors de ]-2^{cfg.n - 1 - cfg.d}, 2^{cfg.n - 1 - cfg.d}["
        )
    # Le produit par une puissance de deux est exact en double précision.
    floored = np.floor(np.ldexp(arr, cfg.d))
    return reduce(as_ring_array(floored), cfg)


def decode_array(raw: np.ndarray, cfg: RingConfig) -> np.ndarray:
    """Décode un tableau d'éléments de l'anneau en réels ``float64``."""
    signed = to_signed(np.asarray(raw, dtype=object), cfg)
    return np.ldexp(np.asarray(signed, dtype=np.float64), -cfg.d)
