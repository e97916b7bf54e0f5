"""Configuration pytest racine pour quadmpc."""

import os
from collections.abc import Callable
from typing import Any

import django
import numpy as np
import pytest

# Setup Django settings
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "app.settings")

# Setup Django
django.setup()

from ring.arithmetic import RingConfig, as_ring_array, reduce  # noqa: E402
from sharing.algebra import share_init  # noqa: E402
from sharing.engine import Engine  # noqa: E402
from sharing.prf import uniform_ring  # noqa: E402
from sharing.shares import ShareKind  # noqa: E402
from tensor.share_tensor import ShareTensor  # noqa: E402


@pytest.fixture
def engine() -> Engine:
    """Engine par défaut (n=128, d=40) avec vérification de la réplication."""
    return Engine(seed=7, debug_checks=True)


@pytest.fixture
def small_engine() -> Engine:
    """Engine n=16, d=4 pour les tests exhaustifs."""
    return Engine(RingConfig(16, 4), seed=3, debug_checks=True, transcripts=True)


@pytest.fixture
def byte_engine() -> Engine:
    """Engine n=8, d=4 : tout Z_256 tient dans un tableau."""
    return Engine(RingConfig(8, 4), seed=5, debug_checks=True)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def _share_raw(engine: Engine, raw: Any, seed: int = 0) -> ShareTensor:
    values = reduce(as_ring_array(raw), engine.config)
    bitgen = np.random.default_rng(seed).bit_generator
    x1 = uniform_ring(bitgen, tuple(np.shape(values)), engine.config)
    x2 = reduce(values - x1, engine.config)
    return share_init(engine, x1, x2, ShareKind.ARITHMETIC)


@pytest.fixture
def share_raw() -> Callable[..., ShareTensor]:
    """Partage directement des éléments bruts de l'anneau (sans encodage)."""
    return _share_raw


@pytest.fixture
def superadmin_user(db: Any) -> Any:
    """Fixture pour créer un superutilisateur."""
    from django.contrib.auth import get_user_model

    return get_user_model().objects.create_superuser(
        username="superadmin", email="superadmin@quadmpc.test", password="TestPass123!"
    )


@pytest.fixture
def operator_user(db: Any) -> Any:
    """Fixture pour créer un opérateur sans droits d'administration."""
    from django.contrib.auth import get_user_model

    return get_user_model().objects.create_user(
        username="operator", email="operator@quadmpc.test", password="Operator123!"
    )
