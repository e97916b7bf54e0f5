"""
URLs de l'app runs.
"""

from django.urls import path

from . import views

app_name = "runs"

urlpatterns = [
    path("<int:pk>/stats/", views.run_stats, name="stats"),
]
