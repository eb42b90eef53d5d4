from django.apps import AppConfig


class OrbitsConfig(AppConfig):
    name = "orbits"
