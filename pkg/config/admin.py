"""
Admin configuration pour l'app config.
"""

from typing import Any

from django.contrib import admin
from django.http import HttpRequest

from .models import EngineConfig


@admin.register(EngineConfig)
class EngineConfigAdmin(admin.ModelAdmin):
    """Configuration de l'admin pour EngineConfig."""

    fieldsets = (
        ("Anneau", {"fields": ("ring_bits", "fraction_bits")}),
        ("Exécution", {"fields": ("seed", "latency", "optimize")}),
        ("Protocoles", {"fields": ("ppa", "half_sharing", "debug_checks")}),
        (
            "Tableaux sur disque",
            {
                "fields": ("large_array_chunk_bytes", "large_array_cache_chunks"),
                "classes": ("collapse",),
            },
        ),
    )
    readonly_fields = ("updated_at",)

    def has_add_permission(self, request: HttpRequest) -> bool:
        """Empêche la création de multiples instances."""
        return not EngineConfig.objects.exists()

    def has_delete_permission(self, request: HttpRequest, obj: Any = None) -> bool:
        """Empêche la suppression de l'instance unique."""
        return False
