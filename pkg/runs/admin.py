"""
Admin configuration pour l'app runs.
"""

from typing import Any

from django.contrib import admin
from django.http import HttpRequest
from django.utils.translation import gettext_lazy as _

from .models import RunRecord


@admin.register(RunRecord)
class RunRecordAdmin(admin.ModelAdmin):
    """Consultation des exécutions ; elles ne sont créées que par les commandes."""

    list_display = ["command", "target", "status", "total_rounds", "created_at"]
    list_filter = ["command", "status", "created_at"]
    search_fields = ["target", "error"]
    ordering = ["-created_at"]

    fieldsets = (
        (None, {"fields": ("command", "target", "status", "error")}),
        (_("Paramètres"), {"fields": ("config",)}),
        (_("Résultats"), {"fields": ("stats", "summary")}),
        (_("Dates"), {"fields": ("created_at",)}),
    )

    readonly_fields = [
        "command",
        "target",
        "status",
        "error",
        "config",
        "stats",
        "summary",
        "created_at",
    ]

    @admin.display(description=_("Rondes"))
    def total_rounds(self, obj: RunRecord) -> int:
        return obj.total_rounds

    def has_add_permission(self, request: HttpRequest) -> bool:
        return False

    def has_change_permission(self, request: HttpRequest, obj: Any = None) -> bool:
        return False
