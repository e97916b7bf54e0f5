"""
Vues de l'app runs.
"""

from django.contrib.auth.decorators import login_required
from django.http import HttpRequest, JsonResponse
from django.shortcuts import get_object_or_404

from .models import RunRecord


@login_required
def run_stats(request: HttpRequest, pk: int) -> JsonResponse:
    """Statistiques réseau et résumé d'une exécution enregistrée."""
    record = get_object_or_404(RunRecord, pk=pk)
    return JsonResponse(
        {
            "id": record.pk,
            "command": record.command,
            "target": record.target,
            "status": record.status,
            "created_at": record.created_at.isoformat(),
            "config": record.config,
            "stats": record.stats,
            "summary": record.summary,
        }
    )
