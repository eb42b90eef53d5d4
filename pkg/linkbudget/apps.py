from django.apps import AppConfig


class LinkbudgetConfig(AppConfig):
    name = "linkbudget"
