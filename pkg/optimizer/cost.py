"""
Estimation statique du coût d'un programme.

Table de coût des opérations de base, par serveur :

* produit (``mul``, ``outer``) : 1 ronde, 2 éléments de l'anneau par sortie ;
* produit scalaire (``dot``, contraction de ``pack``) : idem, par sortie ;
* comparaison (extraction du bit de signe) : n + 1 rondes en propagation,
  2 + ⌈log2(n - 1)⌉ en préfixes parallèles ; au plus 2n - 1 bits par élément ;
* OT : 1 ronde, 4 éléments par sortie.

Les opérations s'exécutent l'une après l'autre : les rondes s'additionnent.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, fields
from typing import Any


@dataclass(frozen=True)
class CostModel:
    ring_bits: int = 128
    ppa: bool = False

    @property
    def compare_rounds(self) -> int:
        if self.ppa:
            return 2 + math.ceil(math.log2(max(self.ring_bits - 1, 1)))
        return self.ring_bits + 1

    @property
    def compare_bits(self) -> int:
        return 2 * self.ring_bits - 1


@dataclass(frozen=True)
class CostReport:
    """Compteurs estimés ; ``message_estimate`` en éléments de l'anneau."""

    mul_count: int = 0
    dot_count: int = 0
    compare_count: int = 0
    ot_count: int = 0
    round_estimate: int = 0
    message_estimate: int = 0
    bit_estimate: int = 0

    def __add__(self, other: CostReport) -> CostReport:
        return CostReport(
            *(getattr(self, f.name) + getattr(other, f.name) for f in fields(self))
        )

    def scaled(self, times: int) -> CostReport:
        return CostReport(*(getattr(self, f.name) * times for f in fields(self)))

    def maximum(self, other: CostReport) -> CostReport:
        return CostReport(
            *(max(getattr(self, f.name), getattr(other, f.name)) for f in fields(self))
        )

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


FREE = CostReport()


def mul_cost(elements: int) -> CostReport:
    return CostReport(mul_count=1, round_estimate=1, message_estimate=2 * elements)


def dot_cost(elements: int) -> CostReport:
    return CostReport(dot_count=1, round_estimate=1, message_estimate=2 * elements)


def compare_cost(model: CostModel, elements: int) -> CostReport:
    return CostReport(
        compare_count=1,
        round_estimate=model.compare_rounds,
        bit_estimate=model.compare_bits * elements,
    )


def ot_cost(elements: int) -> CostReport:
    return CostReport(ot_count=1, round_estimate=1, message_estimate=4 * elements)


class _Counted:
    """Valeur privée symbolique : compte les produits entre valeurs privées."""

    def __init__(self, tally: list[int]) -> None:
        self.tally = tally

    def __add__(self, other: Any) -> _Counted:
        return self

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __neg__(self) -> _Counted:
        return self

    def __mul__(self, other: Any) -> _Counted:
        if isinstance(other, _Counted):
            self.tally.append(1)
        return self

    __rmul__ = __mul__


def kernel_cost(kernel: Callable[[Any], Any], elements: int) -> CostReport:
    """Coût d'un noyau itératif, déroulé sur une valeur symbolique."""
    tally: list[int] = []
    kernel(_Counted(tally))
    muls = len(tally)
    return CostReport(
        mul_count=muls, round_estimate=muls, message_estimate=2 * elements * muls
    )


def tournament_cost(
    model: CostModel, length: int, rest: int, with_index: bool
) -> CostReport:
    """Tournoi par paires sur un axe de ``length`` éléments (max, argmax)."""
    total = FREE
    width = 2 if with_index else 1
    while length > 1:
        pairs = length // 2
        total = total + compare_cost(model, pairs * rest)
        total = total + ot_cost(pairs * rest * width)
        length -= pairs
    return total
