"""
Django settings for the coexistence simulator project.

Simulation physics is configured through scenario files (see the scenarios
app); this module only holds deployment knobs read from the environment.
"""

import os
from pathlib import Path

ENVIRONMENT = os.environ.get("ENVIRONMENT", "develop")

BASE_DIR = str((Path(__file__) / "..").resolve())

SECRET_KEY = os.environ.get(
    "SECRET_KEY", "s9#k2v!r7m@q4t(w1z8x5c0b3n6y)e&u-h_j+p=l%d^g*f$a"
)

DEBUG = bool(os.environ.get("DEBUG", False))
ALLOWED_HOSTS = [h for h in os.environ.get("ALLOWED_HOSTS", "").split(" ") if h]

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    # our stuff
    "orbits",
    "antenna",
    "linkbudget",
    "association",
    "protection",
    "solver",
    "metrics",
    "scenarios",
]

if not DEBUG and os.environ.get("SENTRY_DSN"):
    import sentry_sdk
    from sentry_sdk.integrations.celery import CeleryIntegration
    from sentry_sdk.integrations.django import DjangoIntegration

    sentry_sdk.init(
        environment=os.environ.get("ENVIRONMENT"),
        dsn=os.environ.get("SENTRY_DSN"),
        release=os.environ.get("GIT_COMMIT", "No version"),
        integrations=[DjangoIntegration(), CeleryIntegration()],
    )

# Nothing is persisted in the database; it only exists so the test runner
# and management commands have a configured default alias.
DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": os.environ.get(
            "DB_NAME", str(Path(BASE_DIR, "..", "coexistence.sqlite3").resolve())
        ),
    }
}
DEFAULT_AUTO_FIELD = "django.db.models.AutoField"

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

LOG_LEVEL = os.environ.get("LOG_LEVEL", "INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "default": {
            "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        }
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "default"}
    },
    "root": {"handlers": ["console"], "level": "WARNING"},
    "loggers": {
        app: {"handlers": ["console"], "level": LOG_LEVEL, "propagate": False}
        for app in (
            "orbits",
            "antenna",
            "linkbudget",
            "association",
            "protection",
            "solver",
            "metrics",
            "scenarios",
        )
    },
}

# Where simulation artefacts are written when no --out is given.
SIMULATION_RESULTS_ROOT = os.environ.get(
    "SIMULATION_RESULTS_ROOT", str(Path(BASE_DIR, "..", "results").resolve())
)
# Bundled scenario presets, addressable by bare name on the command line.
SCENARIO_PRESET_DIR = os.environ.get(
    "SCENARIO_PRESET_DIR",
    str(Path(BASE_DIR, "..", "scenarios", "presets").resolve()),
)
SIMULATION_DEFAULT_PRESET = os.environ.get(
    "SIMULATION_DEFAULT_PRESET", "starlink_kuiper_texas"
)

RABBITMQ_HOST = os.environ.get("RABBITMQ_HOST", "localhost")
RABBITMQ_USERNAME = os.environ.get("RABBITMQ_USERNAME", "guest")
RABBITMQ_PASSWORD = os.environ.get("RABBITMQ_PASSWORD", "guest")
RABBITMQ_PORT = os.environ.get("RABBITMQ_PORT", "5672")
RABBITMQ_VHOST = os.environ.get("RABBITMQ_VHOST", "/")

CELERY_BROKER_URL = os.environ.get(
    "BROKER_URL",
    f"amqp://{RABBITMQ_USERNAME}:{RABBITMQ_PASSWORD}@{RABBITMQ_HOST}:{RABBITMQ_PORT}/{RABBITMQ_VHOST}",
)
# Desk runs need no broker: sweep points execute in-process unless a worker
# pool is explicitly configured.
CELERY_TASK_ALWAYS_EAGER = os.environ.get("CELERY_TASK_ALWAYS_EAGER", "1") == "1"
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_TASK_ACKS_LATE = True
CELERY_TASK_REJECT_ON_WORKER_LOST = True
CELERY_TASK_ROUTES = {"scenarios.tasks.run_scenario": {"queue": "simulations"}}
