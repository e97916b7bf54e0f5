from django.apps import AppConfig


class RingConfigApp(AppConfig):
    """Configuration de l'app ring."""

    default_auto_field = "django.db.models.BigAutoField"
    name = "ring"
    verbose_name = "Arithmétique de l'anneau"
