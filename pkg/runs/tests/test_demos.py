"""
Tests pour les démonstrations de bout en bout.
"""

import pytest

from runs.demos import logistic_regression_demo, neural_network_demo
from sharing.engine import Engine


@pytest.mark.slow
class TestDemos:
    """Tests des démonstrations contre la référence en virgule fixe."""

    def test_logistic_regression(self) -> None:
        """Test une époque de SGD : poids à 1e-4 près de la référence."""
        report = logistic_regression_demo(Engine(seed=3))

        assert report.name == "lr"
        assert report.metrics["max_abs_diff"] <= 1e-4
        assert len(report.metrics["weights"]) == 8
        assert report.metrics["accuracy"] > 0.6
        assert report.stats.total_rounds > 0

    def test_neural_network(self) -> None:
        """Test l'inférence : accord total avec la référence sur 100 exemples."""
        report = neural_network_demo(Engine(seed=3))

        assert report.name == "nn"
        assert report.metrics["samples"] == 100
        assert report.metrics["agreement"] == 1.0
        assert report.metrics["float_agreement"] >= 0.95
        assert len(report.metrics["predictions"]) == 100
