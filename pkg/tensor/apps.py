from django.apps import AppConfig


class TensorConfig(AppConfig):
    """Configuration de l'app tensor."""

    default_auto_field = "django.db.models.BigAutoField"
    name = "tensor"
    verbose_name = "Tenseurs de partages"
