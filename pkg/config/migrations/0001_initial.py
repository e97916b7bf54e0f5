import django.core.validators
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="EngineConfig",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                (
                    "ring_bits",
                    models.PositiveSmallIntegerField(
                        default=128,
                        validators=[
                            django.core.validators.MinValueValidator(2),
                            django.core.validators.MaxValueValidator(128),
                        ],
                        verbose_name="Bits de l'anneau (n)",
                    ),
                ),
                (
                    "fraction_bits",
                    models.PositiveSmallIntegerField(
                        default=40,
                        validators=[django.core.validators.MinValueValidator(1)],
                        verbose_name="Bits fractionnaires (d)",
                    ),
                ),
                (
                    "seed",
                    models.PositiveBigIntegerField(
                        default=0,
                        help_text="Graine des PRF et de l'aléa des clients",
                        verbose_name="Graine",
                    ),
                ),
                (
                    "latency",
                    models.CharField(
                        choices=[
                            ("none", "Aucune"),
                            ("lan", "LAN (10 Gbit/s, 0,2 ms)"),
                            ("wan", "WAN (50 Mbit/s, 100 ms)"),
                        ],
                        default="none",
                        max_length=4,
                        verbose_name="Modèle de latence",
                    ),
                ),
                (
                    "optimize",
                    models.BooleanField(
                        default=True, verbose_name="Optimiser les programmes"
                    ),
                ),
                (
                    "ppa",
                    models.BooleanField(
                        default=False,
                        help_text=(
                            "Additionneur à préfixes parallèles au lieu de la "
                            "propagation"
                        ),
                        verbose_name="Extraction de bit logarithmique",
                    ),
                ),
                (
                    "half_sharing",
                    models.BooleanField(
                        default=False, verbose_name="Demi-partage des retenues"
                    ),
                ),
                (
                    "debug_checks",
                    models.BooleanField(
                        default=False,
                        help_text=(
                            "Contrôle les huit composantes après chaque "
                            "opération privée"
                        ),
                        verbose_name="Vérifier la réplication",
                    ),
                ),
                (
                    "large_array_chunk_bytes",
                    models.PositiveIntegerField(
                        default=4194304,
                        validators=[django.core.validators.MinValueValidator(1)],
                        verbose_name="Taille d'un bloc LargeArray (octets)",
                    ),
                ),
                (
                    "large_array_cache_chunks",
                    models.PositiveSmallIntegerField(
                        default=8,
                        validators=[django.core.validators.MinValueValidator(1)],
                        verbose_name="Blocs LargeArray en cache",
                    ),
                ),
                (
                    "updated_at",
                    models.DateTimeField(
                        auto_now=True, verbose_name="Dernière modification"
                    ),
                ),
            ],
            options={
                "verbose_name": "Configuration des calculs",
                "verbose_name_plural": "Configuration des calculs",
            },
        ),
    ]
