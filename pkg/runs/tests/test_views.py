"""
Tests pour la vue JSON des statistiques.
"""

from typing import Any

import pytest
from django.test import Client
from django.urls import reverse

from runs.models import RunRecord

STATS = {
    "parties": {"S1": {"messages": 2, "bytes": 32, "rounds": 1}},
    "total_rounds": 1,
    "simulated_ms": 0.0,
    "wall_ms": None,
}


@pytest.mark.django_db
class TestRunStatsView:
    """Tests de la vue /runs/<pk>/stats/."""

    def test_requires_login(self, client: Client) -> None:
        """Test que la vue nécessite une connexion."""
        record = RunRecord.objects.create(command="run", target="p", stats=STATS)

        response = client.get(reverse("runs:stats", kwargs={"pk": record.pk}))
        assert response.status_code == 302
        assert "/login/" in response.url

    def test_returns_stats(self, client: Client, operator_user: Any) -> None:
        """Test le contenu renvoyé à un utilisateur connecté."""
        record = RunRecord.objects.create(
            command="bench", target="mul×1", stats=STATS, summary={"op": "mul"}
        )
        client.force_login(operator_user)

        response = client.get(reverse("runs:stats", kwargs={"pk": record.pk}))
        assert response.status_code == 200
        data = response.json()
        assert data["stats"] == STATS
        assert data["summary"] == {"op": "mul"}
        assert data["command"] == "bench"

    def test_unknown_run(self, client: Client, operator_user: Any) -> None:
        """Test une exécution inexistante."""
        client.force_login(operator_user)

        response = client.get(reverse("runs:stats", kwargs={"pk": 999}))
        assert response.status_code == 404
