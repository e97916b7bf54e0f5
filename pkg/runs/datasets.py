"""
Jeux de données synthétiques des démonstrations.

Tout est tiré d'une graine fixe : aucune donnée n'est téléchargée et deux
appels identiques renvoient les mêmes tableaux.
"""

from dataclasses import dataclass

import numpy as np

DATASET_SEED = 20240611


@dataclass(frozen=True)
class ClassificationSet:
    """Exemples ``features`` (m × k) et étiquettes binaires ``labels`` (m)."""

    features: np.ndarray
    labels: np.ndarray


@dataclass(frozen=True)
class TwoLayerNetwork:
    """Réseau k → h → c, ReLU sur la couche cachée, et ses échantillons."""

    samples: np.ndarray
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @property
    def classes(self) -> int:
        return int(self.w2.shape[1])


def logistic_regression_set(
    samples: int = 200, features: int = 8, seed: int = DATASET_SEED
) -> ClassificationSet:
    """Deux classes séparées par un hyperplan, avec 10 % d'étiquettes bruitées."""
    rng = np.random.default_rng(seed)
    normal = rng.normal(0.0, 1.0, features)
    x = rng.normal(0.0, 1.0, (samples, features))
    labels = (x @ normal > 0).astype(np.float64)
    flipped = rng.random(samples) < 0.1
    labels[flipped] = 1.0 - labels[flipped]
    return ClassificationSet(x, labels)


def two_layer_network(
    samples: int = 100,
    inputs: int = 8,
    hidden: int = 16,
    classes: int = 4,
    seed: int = DATASET_SEED + 1,
) -> TwoLayerNetwork:
    rng = np.random.default_rng(seed)
    return TwoLayerNetwork(
        samples=rng.normal(0.0, 1.0, (samples, inputs)),
        w1=rng.normal(0.0, 1.0 / np.sqrt(inputs), (inputs, hidden)),
        b1=rng.normal(0.0, 0.1, hidden),
        w2=rng.normal(0.0, 1.0 / np.sqrt(hidden), (hidden, classes)),
        b2=rng.normal(0.0, 0.1, classes),
    )
