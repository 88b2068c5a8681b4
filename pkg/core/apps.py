from django.apps import AppConfig


class CoreConfig(AppConfig):
    name = 'core'
    verbose_name = 'Stochastic vectors, base patterns and frequency matrices'
