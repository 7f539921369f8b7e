from django.apps import AppConfig


class H2DionConfig(AppConfig):
    name = 'h2dion'
    verbose_name = 'H2 double ionization simulator'
