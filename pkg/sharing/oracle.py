"""
Oracle de débogage : collecte les huit composantes directement dans le
stockage des serveurs, sans passer par le réseau.

Rien ici n'apparaît dans les compteurs du réseau.
"""

from __future__ import annotations

import functools
from collections.abc import Callable
from typing import TYPE_CHECKING, Any, ParamSpec, TypeVar

import numpy as np
import structlog

from netsim.stats import stats_diff
from ring.arithmetic import decode_array, reduce

from .exceptions import ReplicationError
from .parties import SERVERS
from .shares import COMPONENT_NAMES, ShareKind, combine

if TYPE_CHECKING:
    from tensor.share_tensor import ShareTensor

    from .engine import Engine

logger = structlog.get_logger(__name__)

P = ParamSpec("P")
R = TypeVar("R")


def collect(tensor: ShareTensor) -> dict[str, np.ndarray]:
    """Les huit composantes ``x1, x1', x2, x2', xa, xa', xb, xb'``."""
    engine = tensor.engine
    components: dict[str, np.ndarray] = {}
    for pid in SERVERS:
        share = engine.state(pid).store[tensor.tid]
        first, second = COMPONENT_NAMES[pid]
        components[first] = np.asarray(share.first)
        components[second] = np.asarray(share.second)
    return components


def _equal(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(np.asarray(a == b, dtype=bool)))


def check_replication(tensor: ShareTensor) -> None:
    """Vérifie xa = x2, xa' = x1', xb = x1, xb' = x2' et x1+x2 = x1'+x2'."""
    c = collect(tensor)
    cfg, kind = tensor.engine.config, tensor.kind
    pairs = (("xa", "x2"), ("xa'", "x1'"), ("xb", "x1"), ("xb'", "x2'"))
    for left, right in pairs:
        if not _equal(c[left], c[right]):
            raise ReplicationError(f"{left} != {right} pour le tenseur #{tensor.tid}")
    if not _equal(
        combine(kind, c["x1"], c["x2"], cfg), combine(kind, c["x1'"], c["x2'"], cfg)
    ):
        raise ReplicationError(f"x1+x2 != x1'+x2' pour le tenseur #{tensor.tid}")


def open_raw(tensor: ShareTensor) -> np.ndarray:
    """Reconstruit le secret brut sans message (tests uniquement)."""
    c = collect(tensor)
    if tensor.kind is ShareKind.BIT:
        return np.bitwise_xor(c["x1"], c["x2"]).astype(np.uint8)
    return reduce(c["x1"] + c["x2"], tensor.engine.config)


def open_values(tensor: ShareTensor) -> np.ndarray:
    """Comme ``open_raw`` mais décodé en réels pour les partages arithmétiques."""
    raw = open_raw(tensor)
    if tensor.kind is ShareKind.BIT:
        return raw
    return decode_array(raw, tensor.engine.config)


def _tensors(value: Any) -> list[ShareTensor]:
    from tensor.share_tensor import ShareTensor

    if isinstance(value, ShareTensor):
        return [value]
    if isinstance(value, tuple | list):
        return [t for item in value for t in _tensors(item)]
    return []


def _find_engine(values: list[Any]) -> Engine | None:
    from .engine import Engine

    for value in values:
        if isinstance(value, Engine):
            return value
    tensors = _tensors(values)
    return tensors[0].engine if tensors else None


def private_operation(name: str) -> Callable[[Callable[P, R]], Callable[P, R]]:
    """Journalise une opération privée et, en mode debug, vérifie ses sorties."""

    def decorator(fn: Callable[P, R]) -> Callable[P, R]:
        @functools.wraps(fn)
        def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
            engine = _find_engine([*args, *kwargs.values()])
            before = engine.stats_snapshot() if engine is not None else None
            result = fn(*args, **kwargs)
            outputs = _tensors(result)
            if engine is not None and before is not None:
                diff = stats_diff(before, engine.stats_snapshot())
                logger.debug(
                    "protocol.done",
                    protocol=name,
                    shape=outputs[0].shape if outputs else None,
                    rounds=diff.total_rounds,
                    bytes=sum(p.bytes for p in diff.parties.values()),
                )
                if engine.debug_checks:
                    for tensor in outputs:
                        check_replication(tensor)
            return result

        return wrapper

    return decorator
