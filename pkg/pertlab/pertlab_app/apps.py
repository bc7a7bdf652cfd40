from django.apps import AppConfig


class PertlabAppConfig(AppConfig):
    name = "pertlab_app"
    verbose_name = "Perturbation lab"
