from django.apps import AppConfig


class MeasureSamplerConfig(AppConfig):
    name = 'measure_sampler'
    verbose_name = 'Cylinder measures, digit sampling and pointwise dimension'
