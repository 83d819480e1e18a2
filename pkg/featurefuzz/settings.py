"""
Django settings for the featurefuzz project.

Toolkit defaults live in ``FEATUREFUZZ`` below; every entry can be
overridden from the environment (or a ``.env`` file in the working
directory) with a ``FEATUREFUZZ_`` prefixed variable.

For the full list of Django settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import json
import os
from pathlib import Path

from django.urls import reverse_lazy
from django.utils.translation import gettext_lazy as _
from dotenv import load_dotenv

# Load the environment variables from the invocation directory
env = Path.cwd() / ".env"
load_dotenv(env)

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


def _env_bool(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


def _env_json(name: str, default):
    # Lists and numbers are written as JSON, e.g. FEATUREFUZZ_BANDS=[0.3,0.7]
    value = os.getenv(name)
    if value is None:
        return default
    return json.loads(value)


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv("SECRET_KEY", "featurefuzz-local-only-secret-key")

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = _env_bool("FEATUREFUZZ_DEBUG", False)

ALLOWED_HOSTS = ["localhost", "127.0.0.1"]


# Application definition

INSTALLED_APPS = [
    "unfold",
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",
    "rest_framework",
    "apps.core",
    "apps.features",
    "apps.corpus",
    "apps.clustering",
    "apps.confgen",
    "apps.campaigns",
    "apps.reports",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.contrib.sessions.middleware.SessionMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.middleware.csrf.CsrfViewMiddleware",
    "django.contrib.auth.middleware.AuthenticationMiddleware",
    "django.contrib.messages.middleware.MessageMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

ROOT_URLCONF = "featurefuzz.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.request",
                "django.contrib.auth.context_processors.auth",
                "django.contrib.messages.context_processors.messages",
            ],
        },
    },
]

WSGI_APPLICATION = "featurefuzz.wsgi.application"


# Database
# Imported campaign ledgers are stored in a local SQLite file.

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": os.getenv("FEATUREFUZZ_DB_PATH", str(BASE_DIR / "featurefuzz.sqlite3")),
    }
}


AUTH_PASSWORD_VALIDATORS = [
    {
        "NAME": "django.contrib.auth.password_validation.UserAttributeSimilarityValidator",
    },
    {
        "NAME": "django.contrib.auth.password_validation.MinimumLengthValidator",
    },
]


# Internationalization

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True


STATIC_URL = "static/"

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Logging
# Everything goes to stderr so stdout stays free for command output.

LOG_LEVEL = os.getenv("FEATUREFUZZ_LOG_LEVEL", "INFO").upper()

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "console": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "console",
            "stream": "ext://sys.stderr",
        },
    },
    "loggers": {
        "apps": {"handlers": ["console"], "level": LOG_LEVEL, "propagate": False},
        "featurefuzz": {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
        "django": {"handlers": ["console"], "level": "WARNING"},
    },
}


# Toolkit defaults. Command-line flags and --config files take precedence.

FEATUREFUZZ = {
    "INCLUDE_GLOBS": _env_json("FEATUREFUZZ_INCLUDE_GLOBS", ["**/*.c"]),
    "EXTRACT_WORKERS": int(os.getenv("FEATUREFUZZ_EXTRACT_WORKERS", "1")),
    "N_INIT": int(os.getenv("FEATUREFUZZ_N_INIT", "10")),
    "MAX_ITER": int(os.getenv("FEATUREFUZZ_MAX_ITER", "300")),
    "TOLERANCE": float(os.getenv("FEATUREFUZZ_TOLERANCE", "1e-4")),
    "OPT_LEVELS": _env_json("FEATUREFUZZ_OPT_LEVELS", ["-O0", "-O3"]),
    "COMPILE_TIMEOUT": float(os.getenv("FEATUREFUZZ_COMPILE_TIMEOUT", "10")),
    "RUN_TIMEOUT": float(os.getenv("FEATUREFUZZ_RUN_TIMEOUT", "10")),
    "GENERATOR_TIMEOUT": float(os.getenv("FEATUREFUZZ_GENERATOR_TIMEOUT", "60")),
    "TIME_BUDGET": os.getenv("FEATUREFUZZ_TIME_BUDGET", "13h"),
    "WORKERS": int(os.getenv("FEATUREFUZZ_WORKERS", "1")),
    "BANDS": _env_json("FEATUREFUZZ_BANDS", [0.33, 0.66]),
    "STDOUT_HEAD_BYTES": int(os.getenv("FEATUREFUZZ_STDOUT_HEAD_BYTES", "4096")),
}


UNFOLD = {
    "SITE_HEADER": "featurefuzz",
    "SITE_SYMBOL": "bug_report",  # symbol from icon set
    "SIDEBAR": {
        "show_search": True,
        "show_all_applications": True,
        "navigation": [
            {
                "title": _("Campaigns"),
                "separator": True,
                "collapsible": True,
                "items": [
                    {
                        "title": _("Campaigns"),
                        "icon": "science",
                        "link": reverse_lazy("admin:campaigns_campaign_changelist"),
                    },
                    {
                        "title": _("Trials"),
                        "icon": "bug_report",
                        "link": reverse_lazy("admin:campaigns_trial_changelist"),
                    },
                ],
            },
            {
                "title": _("Users & Groups"),
                "separator": True,
                "collapsible": True,
                "items": [
                    {
                        "title": _("Users"),
                        "icon": "people",
                        "link": reverse_lazy("admin:auth_user_changelist"),
                    },
                    {
                        "title": _("Groups"),
                        "icon": "groups",
                        "link": reverse_lazy("admin:auth_group_changelist"),
                    },
                ],
            },
        ],
    },
}
