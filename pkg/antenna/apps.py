from django.apps import AppConfig


class AntennaConfig(AppConfig):
    name = "antenna"
