# elipsoides/conf.py
from __future__ import annotations

from pathlib import Path

DEFAULTS = {
    "SEED": 2024,
    "WORKERS": 1,
    "OUTPUT_DIR": Path.cwd() / "saidas",
    "CSV_DIGITS": 12,
    "INVENTORY_HOLDING_COST": 1.0,
}


def experiment_setting(key: str):
    """settings.ELIPSOIDES[key] quando o Django está configurado; senão o default daqui."""
    try:
        from django.conf import settings

        if settings.configured:
            value = (getattr(settings, "ELIPSOIDES", None) or {}).get(key)
            if value is not None:
                return value
    except ImportError:
        pass
    return DEFAULTS[key]
