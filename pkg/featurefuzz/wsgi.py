"""
WSGI config for the featurefuzz project.

Only the result browser (Django admin over imported campaign ledgers) is
served; the toolkit itself runs through ``manage.py`` subcommands.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "featurefuzz.settings")

application = get_wsgi_application()
