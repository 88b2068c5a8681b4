from django.apps import AppConfig


class ClosedFormConfig(AppConfig):
    name = 'closed_form'
    verbose_name = 'Optimal frequency matrix and dimension formulas'
