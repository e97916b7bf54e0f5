"""
Valeurs par défaut d'un calcul.

``engine_defaults()`` lit l'``EngineConfig`` à travers le cache de Django et
retombe sur ``settings.QUADMPC`` quand la base n'est pas disponible (tests
sans base, commande lancée avant les migrations).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Any

import structlog
from django.conf import settings
from django.core.cache import cache

if TYPE_CHECKING:
    from .models import EngineConfig

logger = structlog.get_logger(__name__)

CACHE_KEY = "engine_defaults"
CACHE_TIMEOUT = 3600


@dataclass(frozen=True)
class EngineDefaults:
    ring_bits: int = 128
    fraction_bits: int = 40
    seed: int = 0
    latency: str = "none"
    optimize: bool = True
    ppa: bool = False
    half_sharing: bool = False
    debug_checks: bool = False
    large_array_chunk_bytes: int = 4 * 1024 * 1024
    large_array_cache_chunks: int = 8

    @classmethod
    def from_model(cls, config: EngineConfig) -> EngineDefaults:
        return cls(**{name: getattr(config, name) for name in asdict(cls())})

    def as_model_fields(self) -> dict[str, Any]:
        return asdict(self)


def settings_defaults() -> EngineDefaults:
    """Valeurs du dictionnaire ``QUADMPC`` des réglages."""
    values: dict[str, Any] = getattr(settings, "QUADMPC", {})
    base = EngineDefaults()
    return EngineDefaults(
        **{
            name: values.get(name.upper(), default)
            for name, default in asdict(base).items()
        }
    )


def engine_defaults() -> EngineDefaults:
    """Valeurs par défaut courantes (base, sinon réglages)."""
    try:
        defaults = cache.get(CACHE_KEY)
        if defaults is None:
            from .models import EngineConfig

            defaults = EngineDefaults.from_model(EngineConfig.get_solo())
            cache.set(CACHE_KEY, defaults, CACHE_TIMEOUT)
    except Exception as exc:
        logger.warning("engine_defaults.fallback", reason=str(exc))
        return settings_defaults()
    return defaults  # type: ignore[no-any-return]


def invalidate() -> None:
    try:
        cache.delete(CACHE_KEY)
    except Exception as exc:
        logger.warning("engine_defaults.invalidate_failed", reason=str(exc))
