from django.apps import AppConfig


class VariationalConfig(AppConfig):
    name = 'variational'
    verbose_name = 'Maximum-entropy solvers over pi(alpha)'
