"""
ASGI config for the frislab project.

Only serves the admin and the read-only results API; experiments run
through ``manage.py fris``.
"""

import os

from django.core.asgi import get_asgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'frislab.settings')

application = get_asgi_application()
