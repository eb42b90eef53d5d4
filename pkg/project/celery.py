import os

from celery import Celery

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "project.settings")

app = Celery("coexistence")

# CELERY_-prefixed Django settings configure the app; with
# CELERY_TASK_ALWAYS_EAGER on, sweep points run in the calling process.
app.config_from_object("django.conf:settings", namespace="CELERY")

# Picks up scenarios.tasks.
app.autodiscover_tasks()
