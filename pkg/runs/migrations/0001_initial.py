from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="RunRecord",
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
                    "command",
                    models.CharField(
                        choices=[
                            ("run", "Programme"),
                            ("bench", "Micro-benchmark"),
                            ("demo", "Démonstration"),
                        ],
                        db_index=True,
                        max_length=5,
                        verbose_name="Commande",
                    ),
                ),
                (
                    "target",
                    models.CharField(
                        help_text="Fichier programme, opération mesurée ou nom de la démo",
                        max_length=255,
                        verbose_name="Cible",
                    ),
                ),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("success", "Réussie"),
                            ("engine_error", "Erreur du moteur"),
                        ],
                        default="success",
                        max_length=12,
                        verbose_name="Statut",
                    ),
                ),
                (
                    "config",
                    models.JSONField(default=dict, verbose_name="Configuration"),
                ),
                (
                    "stats",
                    models.JSONField(
                        default=dict,
                        help_text="{parties, total_rounds, simulated_ms, wall_ms}",
                        verbose_name="Statistiques réseau",
                    ),
                ),
                (
                    "summary",
                    models.JSONField(
                        blank=True, default=dict, verbose_name="Résumé des sorties"
                    ),
                ),
                ("error", models.TextField(blank=True, verbose_name="Erreur")),
                (
                    "created_at",
                    models.DateTimeField(
                        auto_now_add=True,
                        db_index=True,
                        verbose_name="Date d'exécution",
                    ),
                ),
            ],
            options={
                "verbose_name": "Exécution",
                "verbose_name_plural": "Exécutions",
                "ordering": ["-created_at"],
                "indexes": [
                    models.Index(
                        fields=["command", "-created_at"],
                        name="runs_runrec_command_6f1d2a_idx",
                    )
                ],
            },
        ),
    ]
