from django.apps import AppConfig


class RunsConfig(AppConfig):
    """Configuration de l'app runs."""

    default_auto_field = "django.db.models.BigAutoField"
    name = "runs"
    verbose_name = "Exécutions"
