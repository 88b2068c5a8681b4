from django.apps import AppConfig


class ExpansionConfig(AppConfig):
    name = 'expansion'
    verbose_name = 'Cantor series digits, cylinders and frequency counts'
