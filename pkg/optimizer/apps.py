from django.apps import AppConfig


class OptimizerConfig(AppConfig):
    """Configuration de l'app optimizer."""

    default_auto_field = "django.db.models.BigAutoField"
    name = "optimizer"
    verbose_name = "Programmes privés et réécritures"
