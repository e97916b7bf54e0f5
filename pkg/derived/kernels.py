"""
Récurrences communes aux opérations privées et à la référence en clair.

Un noyau n'utilise que ``+``, ``-``, ``*`` et la négation : appliqué à un
``ShareTensor`` il déroule le protocole, appliqué à un ``FixedRef`` il donne
la même suite d'opérations en clair avec troncature par défaut.
"""

from __future__ import annotations

import math
from typing import Any, Protocol, Self, TypeVar

from ring.arithmetic import RingConfig

from .exceptions import DomainError
from .params import LOG_EXP_SQUARINGS, IterParams

# Erreur relative tolérée par les simulations flottantes de convergence.
CONVERGENCE_TOL = 1e-9


class FixedArithmetic(Protocol):
    def __add__(self, other: Any) -> Self: ...
    def __radd__(self, other: Any) -> Self: ...
    def __sub__(self, other: Any) -> Self: ...
    def __rsub__(self, other: Any) -> Self: ...
    def __mul__(self, other: Any) -> Self: ...
    def __rmul__(self, other: Any) -> Self: ...
    def __neg__(self) -> Self: ...


T = TypeVar("T", bound=FixedArithmetic)


# Domaines ------------------------------------------------------------------


def reciprocal_exponent(params: IterParams) -> int:
    """s tel que x·2^-s ≤ 1 sur tout le domaine."""
    return math.ceil(math.log2(params.upper))


def sqrt_exponent(params: IterParams) -> int:
    """s tel que x·4^-s ≤ 1 sur tout le domaine."""
    return math.ceil(math.log2(params.upper) / 2)


def check_reciprocal(params: IterParams, cfg: RingConfig) -> None:
    if params.lower <= 0:
        raise DomainError("reciprocal attend un domaine strictement positif")
    x_min = params.lower * 2.0 ** -reciprocal_exponent(params)
    if 1.0 / x_min >= cfg.max_magnitude / 4:
        raise DomainError(f"1/{x_min} ne tient pas dans l'anneau")
    y = 48.0 / 17.0 - 32.0 / 17.0 * x_min
    for _ in range(params.iter_cnt):
        y = y * (2.0 - x_min * y)
    if not abs(x_min * y - 1.0) <= CONVERGENCE_TOL:
        raise DomainError(
            f"{params.iter_cnt} itérations ne suffisent pas sur "
            f"[{params.lower}, {params.upper}]"
        )


def check_sqrt(params: IterParams, cfg: RingConfig) -> None:
    if params.lower <= 0:
        raise DomainError("sqrt attend un domaine strictement positif")
    x_min = params.lower * 4.0 ** -sqrt_exponent(params)
    if 1.0 / math.sqrt(x_min) >= cfg.max_magnitude / 4:
        raise DomainError(f"1/sqrt({x_min}) ne tient pas dans l'anneau")
    y = 1.0
    for _ in range(params.iter_cnt):
        y = y * (3.0 - x_min * y * y) / 2.0
    if not abs(x_min * y * y - 1.0) <= CONVERGENCE_TOL:
        raise DomainError(
            f"{params.iter_cnt} itérations ne suffisent pas sur "
            f"[{params.lower}, {params.upper}]"
        )


def _check_squarings(squarings: int, cfg: RingConfig) -> None:
    if squarings >= cfg.d:
        raise DomainError(f"2^-{squarings} n'est pas représentable avec d={cfg.d}")


def check_exp(params: IterParams, cfg: RingConfig) -> None:
    _check_squarings(params.iter_cnt, cfg)
    if params.lower <= -(2.0**params.iter_cnt):
        raise DomainError(
            f"1 + x/2^{params.iter_cnt} doit rester positif (lower={params.lower})"
        )
    if params.upper >= math.log(cfg.max_magnitude / 4):
        raise DomainError(f"exp({params.upper}) ne tient pas dans l'anneau")


def check_log(params: IterParams, cfg: RingConfig) -> None:
    if params.lower <= 0:
        raise DomainError("log attend un domaine strictement positif")
    _check_squarings(LOG_EXP_SQUARINGS, cfg)
    if 2 * params.upper + 1 >= 2.0**LOG_EXP_SQUARINGS:
        raise DomainError(f"log : upper={params.upper} trop grand")
    for x in _geometric_grid(params.lower, params.upper):
        y = x / 120.0 - 20.0 * math.exp(-2.0 * x - 1.0) + 3.0
        for _ in range(params.iter_cnt):
            y = y - 1.0 + x * math.exp(-y)
        if not abs(y - math.log(x)) <= CONVERGENCE_TOL * max(1.0, abs(y)):
            raise DomainError(
                f"{params.iter_cnt} itérations ne suffisent pas pour log({x})"
            )


def _geometric_grid(lower: float, upper: float, points: int = 17) -> list[float]:
    ratio = (upper / lower) ** (1.0 / (points - 1))
    return [lower * ratio**i for i in range(points)]


# Noyaux --------------------------------------------------------------------


def euler_logistic(x: T, params: IterParams) -> T:
    """Intègre r' = r(1 - r) de ``start`` à x en ``iter_cnt`` pas d'Euler."""
    start = params.start
    initial = 1.0 / (1.0 + math.exp(-start))
    delta = (x - start) * (1.0 / params.iter_cnt)
    # Premier pas : la dérivée au départ est publique.
    result = delta * (initial * (1.0 - initial)) + initial
    for _ in range(params.iter_cnt - 1):
        derivate = result * (1.0 - result)
        result = result + delta * derivate
    return result


def newton_reciprocal(x: T, params: IterParams) -> T:
    """1/x par y ← y(2 - xy).

    Départ 48/17 - 32/17·x' avec x' = x·2^-s, exprimé directement sur x : x
    n'est jamais tronqué.
    """
    factor = 2.0 ** -reciprocal_exponent(params)
    y = x * (-32.0 / 17.0 * factor * factor) + 48.0 / 17.0 * factor
    for _ in range(params.iter_cnt):
        y = y * (2.0 - x * y)
    return y


def newton_sqrt(x: T, params: IterParams) -> T:
    """sqrt(x) = x·rsqrt(x), rsqrt par y ← y(3 - xy²)/2 depuis y = 2^-s."""
    y = x * 0.0 + 2.0 ** -sqrt_exponent(params)
    for _ in range(params.iter_cnt):
        y = y * (3.0 - x * (y * y)) * 0.5
    return x * y


def exp_by_squaring(x: T, squarings: int) -> T:
    """(1 + x/2^m)^(2^m)."""
    y = x * 2.0**-squarings + 1.0
    for _ in range(squarings):
        y = y * y
    return y


def newton_log(x: T, params: IterParams) -> T:
    """Résout e^y = x par y ← y - 1 + x·e^-y."""
    y = x * (1.0 / 120.0) - exp_by_squaring(x * -2.0 - 1.0, LOG_EXP_SQUARINGS) * 20.0
    y = y + 3.0
    for _ in range(params.iter_cnt):
        y = y - 1.0 + x * exp_by_squaring(-y, LOG_EXP_SQUARINGS)
    return y
