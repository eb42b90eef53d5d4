from django.apps import AppConfig


class ProtectionAppConfig(AppConfig):
    name = "protection"
