import os
from dotenv import load_dotenv
from pathlib import Path

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


def env_bool(name: str, default: bool) -> bool:
    value = os.environ.get(name)
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


# The lab has no web surface; the key only satisfies Django's startup checks.
SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "pertlab-insecure-local-key")

DEBUG = env_bool("DJANGO_DEBUG", False)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "rest_framework",

    "pertlab_app.apps.PertlabAppConfig",
]

# No persistence beyond report files
DATABASES = {}

REST_FRAMEWORK = {
    "UNAUTHENTICATED_USER": None,
    "COMPACT_JSON": True,
}


# Internationalization

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Logging

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "%(asctime)s %(levelname)s %(name)s %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "pertlab_app": {
            "handlers": ["console"],
            "level": os.environ.get("PERTLAB_LOG_LEVEL", "WARNING"),
            "propagate": False,
        },
    },
}


# Numerical defaults, all overridable from the environment

PERTLAB = {
    "QUAD_RTOL": float(os.environ.get("PERTLAB_QUAD_RTOL", "1e-10")),
    "QUAD_ATOL": float(os.environ.get("PERTLAB_QUAD_ATOL", "1e-14")),
    "QUAD_MAX_STEPS": int(os.environ.get("PERTLAB_QUAD_MAX_STEPS", "200000")),
    "X_MAX": float(os.environ.get("PERTLAB_X_MAX", "25.0")),
    "SHOOT_RTOL": float(os.environ.get("PERTLAB_SHOOT_RTOL", "1e-12")),
    "BASIS_RTOL": float(os.environ.get("PERTLAB_BASIS_RTOL", "1e-13")),
    "MAX_ORDER": int(os.environ.get("PERTLAB_MAX_ORDER", "10")),
    "XCUT_GRID": os.environ.get("PERTLAB_XCUT_GRID", "4:6:0.5"),
    "SIGMA_GRID": os.environ.get("PERTLAB_SIGMA_GRID", "1e-8,1e-9,1e-10,1e-11,1e-12"),
    "FIT_MODEL": os.environ.get("PERTLAB_FIT_MODEL", "residue"),
    "OUTPUT_FORMAT": os.environ.get("PERTLAB_OUTPUT_FORMAT", "csv"),
}


# Celery: sweep points run in-process unless a broker is configured

CELERY_BROKER_URL = os.environ.get("REDIS_URL", "redis://localhost:6379/0")
CELERY_RESULT_BACKEND = os.environ.get("REDIS_URL", "redis://localhost:6379/0")
CELERY_TASK_ALWAYS_EAGER = env_bool("PERTLAB_EAGER", True)
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_ACCEPT_CONTENT = ["json"]
