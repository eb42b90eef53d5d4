import warnings

# Loaded with Django so scenarios.tasks binds to this app.
from .celery import app as celery_app

__all__ = ["celery_app"]

# A .env file found from the working directory fills in unset variables
# (LOG_LEVEL, CELERY_TASK_ALWAYS_EAGER, SIMULATION_RESULTS_ROOT, ...) before
# settings are read. Variables already in the environment win.
try:
    from dotenv import find_dotenv, load_dotenv
except ImportError:
    warnings.warn(
        "python-dotenv is not installed; ignoring any .env file",
        ImportWarning,
    )
else:
    env_path = find_dotenv(usecwd=True)
    if env_path:
        load_dotenv(dotenv_path=env_path)
