from django.apps import AppConfig


class DerivedConfig(AppConfig):
    """Configuration de l'app derived."""

    default_auto_field = "django.db.models.BigAutoField"
    name = "derived"
    verbose_name = "Opérations privées dérivées"
