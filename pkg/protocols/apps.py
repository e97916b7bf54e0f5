from django.apps import AppConfig


class ProtocolsConfig(AppConfig):
    """Configuration de l'app protocols."""

    default_auto_field = "django.db.models.BigAutoField"
    name = "protocols"
    verbose_name = "Opérations privées de base"
