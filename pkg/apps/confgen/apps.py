from django.apps import AppConfig


class ConfgenConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.confgen"
    verbose_name = "Configuration sampling"
