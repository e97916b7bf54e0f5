from django.apps import AppConfig


class SharingConfig(AppConfig):
    """Configuration de l'app sharing."""

    default_auto_field = "django.db.models.BigAutoField"
    name = "sharing"
    verbose_name = "Partage de secret répliqué"
