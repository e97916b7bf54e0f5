"""
Modèles de l'app config.
"""

from typing import Any, cast

from django.core.exceptions import ValidationError
from django.core.validators import MaxValueValidator, MinValueValidator
from django.db import models
from django.utils.translation import gettext_lazy as _


class EngineConfig(models.Model):
    """Valeurs par défaut des calculs, modifiables depuis l'admin."""

    class Latency(models.TextChoices):
        NONE = "none", _("Aucune")
        LAN = "lan", _("LAN (10 Gbit/s, 0,2 ms)")
        WAN = "wan", _("WAN (50 Mbit/s, 100 ms)")

    ring_bits = models.PositiveSmallIntegerField(
        verbose_name=_("Bits de l'anneau (n)"),
        default=128,
        validators=[MinValueValidator(2), MaxValueValidator(128)],
    )
    fraction_bits = models.PositiveSmallIntegerField(
        verbose_name=_("Bits fractionnaires (d)"),
        default=40,
        validators=[MinValueValidator(1)],
    )
    seed = models.PositiveBigIntegerField(
        verbose_name=_("Graine"),
        default=0,
        help_text=_("Graine des PRF et de l'aléa des clients"),
    )
    latency = models.CharField(
        verbose_name=_("Modèle de latence"),
        max_length=4,
        choices=Latency.choices,
        default=Latency.NONE,
    )
    optimize = models.BooleanField(
        verbose_name=_("Optimiser les programmes"), default=True
    )
    ppa = models.BooleanField(
        verbose_name=_("Extraction de bit logarithmique"),
        default=False,
        help_text=_("Additionneur à préfixes parallèles au lieu de la propagation"),
    )
    half_sharing = models.BooleanField(
        verbose_name=_("Demi-partage des retenues"), default=False
    )
    debug_checks = models.BooleanField(
        verbose_name=_("Vérifier la réplication"),
        default=False,
        help_text=_("Contrôle les huit composantes après chaque opération privée"),
    )
    large_array_chunk_bytes = models.PositiveIntegerField(
        verbose_name=_("Taille d'un bloc LargeArray (octets)"),
        default=4 * 1024 * 1024,
        validators=[MinValueValidator(1)],
    )
    large_array_cache_chunks = models.PositiveSmallIntegerField(
        verbose_name=_("Blocs LargeArray en cache"),
        default=8,
        validators=[MinValueValidator(1)],
    )
    updated_at = models.DateTimeField(
        verbose_name=_("Dernière modification"), auto_now=True
    )

    class Meta:
        verbose_name = _("Configuration des calculs")
        verbose_name_plural = _("Configuration des calculs")

    def __str__(self) -> str:
        return f"Z_2^{self.ring_bits}, d={self.fraction_bits}, graine {self.seed}"

    def clean(self) -> None:
        if self.fraction_bits >= self.ring_bits:
            raise ValidationError(
                {"fraction_bits": _("d doit être strictement inférieur à n")}
            )

    @classmethod
    def get_solo(cls) -> "EngineConfig":
        """Retourne l'instance unique, créée depuis les réglages si absente."""
        from .defaults import settings_defaults

        obj, _created = cls.objects.get_or_create(
            pk=1, defaults=settings_defaults().as_model_fields()
        )
        return cast("EngineConfig", obj)

    def save(self, *args: Any, **kwargs: Any) -> None:
        """S'assure qu'il n'y a qu'une seule instance et vide le cache."""
        from .defaults import invalidate

        self.pk = 1
        super().save(*args, **kwargs)
        invalidate()
