"""
Point d'entrée WSGI de quadmpc : l'admin et ``/runs/<pk>/stats/``.

Les calculs eux-mêmes passent par les commandes ``run``, ``bench`` et
``demo`` de ``manage.py``.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "app.settings")

application = get_wsgi_application()
