"""
Fixtures pour les tests des commandes.
"""

from collections.abc import Iterator

import pytest
from django.core.cache import cache


@pytest.fixture(autouse=True)
def fresh_engine_defaults() -> Iterator[None]:
    """Vide le cache des valeurs par défaut entre deux tests."""
    cache.clear()
    yield
    cache.clear()
