"""
WSGI da API pública dos resolvedores (`gunicorn app.wsgi`).
Rotas em elipsoides/urls.py.
"""
import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "app.settings")

application = get_wsgi_application()
