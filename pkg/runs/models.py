"""
Modèles de l'app runs.
"""

from django.db import models
from django.utils.translation import gettext_lazy as _


class RunRecord(models.Model):
    """Trace d'une exécution lancée en ligne de commande."""

    class Command(models.TextChoices):
        RUN = "run", _("Programme")
        BENCH = "bench", _("Micro-benchmark")
        DEMO = "demo", _("Démonstration")

    class Status(models.TextChoices):
        SUCCESS = "success", _("Réussie")
        ENGINE_ERROR = "engine_error", _("Erreur du moteur")

    command = models.CharField(
        verbose_name=_("Commande"),
        max_length=5,
        choices=Command.choices,
        db_index=True,
    )
    target = models.CharField(
        verbose_name=_("Cible"),
        max_length=255,
        help_text=_("Fichier programme, opération mesurée ou nom de la démo"),
    )
    status = models.CharField(
        verbose_name=_("Statut"),
        max_length=12,
        choices=Status.choices,
        default=Status.SUCCESS,
    )
    config = models.JSONField(verbose_name=_("Configuration"), default=dict)
    stats = models.JSONField(
        verbose_name=_("Statistiques réseau"),
        default=dict,
        help_text=_("{parties, total_rounds, simulated_ms, wall_ms}"),
    )
    summary = models.JSONField(
        verbose_name=_("Résumé des sorties"), default=dict, blank=True
    )
    error = models.TextField(verbose_name=_("Erreur"), blank=True)
    created_at = models.DateTimeField(
        verbose_name=_("Date d'exécution"), auto_now_add=True, db_index=True
    )

    class Meta:
        verbose_name = _("Exécution")
        verbose_name_plural = _("Exécutions")
        ordering = ["-created_at"]
        indexes = [models.Index(fields=["command", "-created_at"])]

    def __str__(self) -> str:
        return f"{self.command} {self.target} ({self.created_at:%Y-%m-%d %H:%M})"

    @property
    def total_rounds(self) -> int:
        return int(self.stats.get("total_rounds", 0))
