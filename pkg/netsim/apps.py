from django.apps import AppConfig


class NetsimConfig(AppConfig):
    """Configuration de l'app netsim."""

    default_auto_field = "django.db.models.BigAutoField"
    name = "netsim"
    verbose_name = "Réseau simulé"
