"""
Micro-benchmarks des opérations de base.

Les entrées sont partagées avant la mesure ; seul le trafic de l'opération
elle-même est compté. Le débit simulé n'a de sens qu'avec un modèle de
latence (``--latency lan`` ou ``wan``) ; sans latence il vaut ``None``.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import structlog

from netsim.stats import NetStats, stats_diff
from protocols.bit_extraction import msb
from protocols.comparison import less_than
from protocols.ot import ot_select
from sharing.engine import Engine
from sharing.shares import ShareKind
from tensor import ops
from tensor.share_tensor import ShareTensor

logger = structlog.get_logger(__name__)

Prepared = Callable[[], ShareTensor]
Operation = Callable[[Engine, np.random.Generator, int], Prepared]


def _values(engine: Engine, rng: np.random.Generator, size: int) -> np.ndarray:
    # Les produits doivent rester représentables, même sur un petit anneau.
    cfg = engine.config
    bound = min(1000.0, 2.0 ** ((cfg.n - cfg.d) // 2 - 1))
    return rng.uniform(-bound, bound, size)


def _mul(engine: Engine, rng: np.random.Generator, size: int) -> Prepared:
    x, y = engine.ss(_values(engine, rng, size)), engine.ss(_values(engine, rng, size))
    return lambda: x * y


def _cmp(engine: Engine, rng: np.random.Generator, size: int) -> Prepared:
    x, y = engine.ss(_values(engine, rng, size)), engine.ss(_values(engine, rng, size))
    return lambda: less_than(x, y)


def _dot(engine: Engine, rng: np.random.Generator, size: int) -> Prepared:
    x, y = engine.ss(_values(engine, rng, size)), engine.ss(_values(engine, rng, size))
    return lambda: ops.dot(x, y)


def _bitx(engine: Engine, rng: np.random.Generator, size: int) -> Prepared:
    x = engine.ss(_values(engine, rng, size))
    return lambda: msb(x)


def _ot(engine: Engine, rng: np.random.Generator, size: int) -> Prepared:
    c = engine.ss(rng.integers(0, 2, size), kind=ShareKind.BIT)
    x = engine.ss(_values(engine, rng, size))
    return lambda: ot_select(c, x)


OPERATIONS: dict[str, Operation] = {
    "mul": _mul,
    "cmp": _cmp,
    "dot": _dot,
    "bitx": _bitx,
    "ot": _ot,
}


@dataclass(frozen=True)
class BenchResult:
    op: str
    size: int
    stats: NetStats
    wall_ms: float

    @property
    def wall_ops_per_sec(self) -> float | None:
        return self.size / (self.wall_ms / 1000.0) if self.wall_ms > 0 else None

    @property
    def simulated_ops_per_sec(self) -> float | None:
        ms = self.stats.simulated_ms
        return self.size / (ms / 1000.0) if ms > 0 else None

    def summary(self) -> dict[str, object]:
        return {
            "op": self.op,
            "size": self.size,
            "simulated_ops_per_sec": self.simulated_ops_per_sec,
            "wall_ops_per_sec": self.wall_ops_per_sec,
        }


def run_bench(engine: Engine, op: str, size: int) -> BenchResult:
    """Mesure ``size`` instances de ``op`` exécutées en parallèle."""
    if op not in OPERATIONS:
        raise ValueError(f"Opération inconnue : {op}")
    if size < 1:
        raise ValueError("La taille doit être au moins 1")
    rng = np.random.default_rng(engine.seed)
    operation = OPERATIONS[op](engine, rng, size)
    before = engine.stats_snapshot()
    started = time.perf_counter()
    operation()
    wall_ms = (time.perf_counter() - started) * 1000.0
    stats = stats_diff(before, engine.stats_snapshot())
    logger.info("bench.done", op=op, size=size, rounds=stats.total_rounds)
    return BenchResult(op, size, stats, wall_ms)
