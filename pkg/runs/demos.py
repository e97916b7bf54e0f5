"""
Démonstrations de bout en bout : régression logistique et réseau à deux couches.

Chaque démonstration est comparée à une référence en clair en virgule fixe
(``derived.reference``) qui suit la même suite d'opérations et de
troncatures que le calcul partagé.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import structlog

from derived import reference as ref
from derived.activations import logistic, relu
from derived.selection import argmax
from netsim.stats import NetStats, stats_diff
from sharing.engine import Engine
from sharing.parties import ClientId
from tensor.share_tensor import ShareTensor

from .datasets import (
    ClassificationSet,
    TwoLayerNetwork,
    logistic_regression_set,
    two_layer_network,
)

logger = structlog.get_logger(__name__)

LEARNING_RATE = 0.1
BATCH_SIZE = 50

DATA_OWNER = ClientId(0)
MODEL_OWNER = ClientId(1)


@dataclass
class DemoReport:
    name: str
    stats: NetStats
    metrics: dict[str, Any] = field(default_factory=dict)


def _ref_dot(a: ref.FixedRef, b: ref.FixedRef) -> ref.FixedRef:
    # Une seule troncature par élément de sortie, comme ops.dot.
    return ref.FixedRef(np.right_shift(np.matmul(a.raw, b.raw), a.config.d), a.config)


def _batches(samples: int, size: int) -> list[slice]:
    return [
        slice(start, min(start + size, samples)) for start in range(0, samples, size)
    ]


# Régression logistique -------------------------------------------------------


class _RefRows:
    """Découpe par lignes d'une ``FixedRef`` (``x[a:b]``)."""

    def __init__(self, values: ref.FixedRef) -> None:
        self.values = values

    def __getitem__(self, key: slice) -> ref.FixedRef:
        return ref.FixedRef(self.values.raw[key], self.values.config)


def _sgd_epoch(
    x: Any,
    y: Any,
    w: Any,
    samples: int,
    dot: Callable[[Any, Any], Any],
    sigmoid: Callable[[Any], Any],
    transpose: Callable[[Any], Any],
) -> Any:
    """Une époque de descente de gradient par lots, partagée ou en clair."""
    for batch in _batches(samples, BATCH_SIZE):
        xb, yb = x[batch], y[batch]
        rows = batch.stop - batch.start
        error = sigmoid(dot(xb, w)) - yb
        w = w - dot(transpose(xb), error) * (LEARNING_RATE / rows)
    return w


def logistic_regression_demo(
    engine: Engine, data: ClassificationSet | None = None
) -> DemoReport:
    """Une époque de SGD sur des données privées, comparée à la référence."""
    if data is None:
        data = logistic_regression_set()
    samples, features = data.features.shape
    cfg = engine.config

    x = engine.ss(data.features, client=DATA_OWNER)
    y = engine.ss(data.labels, client=DATA_OWNER)
    before = engine.stats_snapshot()
    w = _sgd_epoch(
        x,
        y,
        engine.public(np.zeros(features)),
        samples,
        dot=lambda a, b: a @ b,
        sigmoid=logistic,
        transpose=lambda a: a.T,
    )
    stats = stats_diff(before, engine.stats_snapshot())
    weights = engine.reveal(w)

    expected = _sgd_epoch(
        _RefRows(ref.FixedRef.encode(data.features, cfg)),
        _RefRows(ref.FixedRef.encode(data.labels, cfg)),
        ref.FixedRef.encode(np.zeros(features), cfg),
        samples,
        dot=_ref_dot,
        sigmoid=ref.logistic,
        transpose=lambda a: ref.FixedRef(a.raw.T, a.config),
    ).values()

    predictions = (data.features @ weights > 0).astype(np.float64)
    metrics = {
        "samples": int(samples),
        "weights": [float(v) for v in weights],
        "max_abs_diff": float(np.max(np.abs(weights - expected))),
        "accuracy": float(np.mean(predictions == data.labels)),
    }
    logger.info(
        "demo.lr",
        rounds=stats.total_rounds,
        max_abs_diff=metrics["max_abs_diff"],
    )
    return DemoReport("lr", stats, metrics)


# Réseau à deux couches ---------------------------------------------------------


def _forward(
    x: Any,
    w1: Any,
    b1: Any,
    w2: Any,
    b2: Any,
    dot: Callable[[Any, Any], Any],
    activation: Callable[[Any], Any],
) -> Any:
    return dot(activation(dot(x, w1) + b1), w2) + b2


def neural_network_demo(
    engine: Engine, network: TwoLayerNetwork | None = None
) -> DemoReport:
    """Inférence privée : échantillons du client 0, modèle du client 1."""
    if network is None:
        network = two_layer_network()
    cfg = engine.config

    x = engine.ss(network.samples, client=DATA_OWNER)
    params: list[ShareTensor] = [
        engine.ss(p, client=MODEL_OWNER)
        for p in (network.w1, network.b1, network.w2, network.b2)
    ]
    before = engine.stats_snapshot()
    logits = _forward(x, *params, dot=lambda a, b: a @ b, activation=relu)
    predicted = argmax(logits, axis=1)
    stats = stats_diff(before, engine.stats_snapshot())
    labels = np.rint(engine.reveal(predicted)).astype(np.int64)

    ref_logits = _forward(
        ref.FixedRef.encode(network.samples, cfg),
        *(
            ref.FixedRef.encode(p, cfg)
            for p in (network.w1, network.b1, network.w2, network.b2)
        ),
        dot=_ref_dot,
        activation=ref.relu,
    )
    expected = ref.argmax(ref_logits, axis=1)
    floating = np.argmax(
        np.maximum(network.samples @ network.w1 + network.b1, 0.0) @ network.w2
        + network.b2,
        axis=1,
    )
    metrics = {
        "samples": int(network.samples.shape[0]),
        "agreement": float(np.mean(labels == expected)),
        "float_agreement": float(np.mean(labels == floating)),
        "predictions": [int(v) for v in labels],
    }
    logger.info("demo.nn", rounds=stats.total_rounds, agreement=metrics["agreement"])
    return DemoReport("nn", stats, metrics)


DEMOS: dict[str, Callable[[Engine], DemoReport]] = {
    "lr": logistic_regression_demo,
    "nn": neural_network_demo,
}
