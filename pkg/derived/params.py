"""
Paramètres des méthodes itératives (nombre d'itérations, domaine, départ).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import DomainError


@dataclass(frozen=True)
class IterParams:
    """Paramètres d'une approximation itérative.

    ``lower`` et ``upper`` bornent le domaine publiquement supposé de
    l'entrée ; ``start`` n'est utilisé que par ``logistic``.
    """

    iter_cnt: int
    lower: float
    upper: float
    start: float = 0.0

    def __post_init__(self) -> None:
        if isinstance(self.iter_cnt, bool) or not isinstance(self.iter_cnt, int):
            raise DomainError(f"iter_cnt doit être un entier, pas {self.iter_cnt!r}")
        if self.iter_cnt < 1:
            raise DomainError(f"iter_cnt doit valoir au moins 1 ({self.iter_cnt})")
        bounds = (self.lower, self.upper, self.start)
        if not all(math.isfinite(v) for v in bounds):
            raise DomainError("Bornes et point de départ doivent être finis")
        if self.lower >= self.upper:
            raise DomainError(
                f"Domaine vide : lower={self.lower} >= upper={self.upper}"
            )


LOGISTIC = IterParams(iter_cnt=100, lower=-8.0, upper=8.0, start=0.0)
RECIPROCAL = IterParams(iter_cnt=15, lower=2.0**-4, upper=2.0**6)
SQRT = IterParams(iter_cnt=20, lower=2.0**-4, upper=2.0**6)
EXP = IterParams(iter_cnt=12, lower=-16.0, upper=16.0)
LOG = IterParams(iter_cnt=8, lower=0.1, upper=100.0)

# Élévations au carré de l'exponentielle interne à log.
LOG_EXP_SQUARINGS = 16
