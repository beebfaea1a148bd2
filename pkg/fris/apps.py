from django.apps import AppConfig


class FrisAppConfig(AppConfig):
    name = 'fris'
    verbose_name = "FRIS secrecy experiments"
    default_auto_field = 'django.db.models.AutoField'
