"""Configure Django for pytest the same way manage.py does for its test runner."""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "project.settings")
django.setup()
