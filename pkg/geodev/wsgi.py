"""
WSGI config for the geodev project.

It exposes the WSGI callable as a module-level variable named ``application``.
Served by gunicorn: ``gunicorn geodev.wsgi:application``.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'geodev.settings')

application = get_wsgi_application()
