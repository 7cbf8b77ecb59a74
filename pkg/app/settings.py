# app/settings.py
import os
from pathlib import Path

from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / ".env")

# ----------------------------------------
# Básico / Segurança
# ----------------------------------------
SECRET_KEY = os.getenv(
    "SECRET_KEY",
    "django-insecure-elipsoides-troque-em-producao",
)

# se não mandar, fica FALSE no servidor
DEBUG = os.getenv("DJANGO_DEBUG", "false").lower() == "true"

# ----------------------------------------
# Hosts
# ----------------------------------------
ALLOWED_HOSTS = [
    h.strip()
    for h in os.getenv("ALLOWED_HOSTS", "*").split(",")
    if h.strip()
]

# ----------------------------------------
# Apps
# ----------------------------------------
INSTALLED_APPS = [
    "django.contrib.auth",
    "django.contrib.contenttypes",

    # terceiros
    "rest_framework",

    # seus apps
    "elipsoides",
]

# ----------------------------------------
# Middleware
# ----------------------------------------
MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.middleware.common.CommonMiddleware",
]

ROOT_URLCONF = "app.urls"

WSGI_APPLICATION = "app.wsgi.application"

# ----------------------------------------
# Banco de dados
# ----------------------------------------
# o app não tem modelos; o sqlite só atende auth/contenttypes
DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}

# ----------------------------------------
# DRF
# ----------------------------------------
REST_FRAMEWORK = {
    "DEFAULT_RENDERER_CLASSES": [
        "rest_framework.renderers.JSONRenderer",
    ],
    "DEFAULT_PARSER_CLASSES": [
        "rest_framework.parsers.JSONParser",
    ],
    "UNAUTHENTICATED_USER": None,
}

# ----------------------------------------
# i18n
# ----------------------------------------
LANGUAGE_CODE = "pt-br"
TIME_ZONE = "America/Araguaina"
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# ----------------------------------------
# Resolvedor log-det (LOGDET_SDP_<CHAVE> no ambiente sobrescreve)
# ----------------------------------------
LOGDET_SDP = {
    "t0": 1.0,
    "t_factor": 10.0,
    "gap_tol": 1e-9,
    "accept_gap": 1e-6,
    "stall_tol": 1e-8,
    "newton_tol": 1e-10,
    "max_newton": 800,
    "max_stage_newton": 60,
    "feas_tol": 1e-7,
    "cond_limit": 1e14,
    "ls_alpha": 0.01,
    "ls_beta": 0.5,
    "phase1_max_newton": 300,
}
for _key in list(LOGDET_SDP):
    _env = os.getenv(f"LOGDET_SDP_{_key.upper()}")
    if _env:
        LOGDET_SDP[_key] = type(LOGDET_SDP[_key])(float(_env))

# ----------------------------------------
# Experimentos
# ----------------------------------------
ELIPSOIDES = {
    "SEED": int(os.getenv("ELIPSOIDES_SEED", "2024")),
    "WORKERS": int(os.getenv("ELIPSOIDES_WORKERS", "1")),
    "OUTPUT_DIR": Path(os.getenv("ELIPSOIDES_OUTPUT_DIR", BASE_DIR / "saidas")),
    "CSV_DIGITS": 12,
    "INVENTORY_HOLDING_COST": float(os.getenv("ELIPSOIDES_HOLDING_COST", "1.0")),
}

# ----------------------------------------
# Logging
# ----------------------------------------
ELIPSOIDES_LOG_LEVEL = os.getenv("ELIPSOIDES_LOG_LEVEL", "DEBUG" if DEBUG else "INFO").upper()

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simples": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "simples"},
    },
    "loggers": {
        "elipsoides": {"handlers": ["console"], "level": ELIPSOIDES_LOG_LEVEL, "propagate": False},
    },
}

if DEBUG:
    LOGGING["loggers"]["django"] = {"handlers": ["console"], "level": "DEBUG"}
    LOGGING["loggers"]["django.db.backends"] = {"handlers": ["console"], "level": "INFO"}
