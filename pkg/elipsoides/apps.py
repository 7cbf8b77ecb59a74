from django.apps import AppConfig


class ElipsoidesConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "elipsoides"
    verbose_name = "Elipsoides de volume mínimo"
