import argparse
import os

from django.core.management.base import BaseCommand, CommandError
from dotenv import dotenv_values
from rest_framework.exceptions import ValidationError

from pertlab_app.exceptions import CONFIG_EXIT_CODE, ConfigurationError, PertlabError
from pertlab_app.runner import run
from pertlab_app.serializers import METHODS, RunConfigSerializer

# long flag name -> serializer field
OPTIONS = {
    "perturbation": "perturbation",
    "order": "order",
    "xcut": "xcut",
    "xcut-grid": "xcut_grid",
    "sigma-grid": "sigma_grid",
    "tol": "tol",
    "extrapolate": "extrapolate",
    "fit-model": "fit_model",
    "format": "format",
    "output": "output",
}


def read_config_file(path: str) -> dict:
    """`key = value` lines keyed by long flag names"""
    if not os.path.isfile(path):
        raise ConfigurationError(f"config file {path!r} does not exist")
    values = {}
    for key, value in dotenv_values(path).items():
        name = key.strip().lstrip("-")
        if name not in OPTIONS:
            raise ConfigurationError(f"unknown key {key!r} in config file {path!r}")
        values[OPTIONS[name]] = value
    return values


def format_validation_error(detail) -> str:
    if isinstance(detail, dict):
        return "; ".join(f"{key}: {format_validation_error(value)}" for key, value in detail.items())
    if isinstance(detail, list):
        return " ".join(format_validation_error(item) for item in detail)
    return str(detail)


class Command(BaseCommand):
    help = "Computes perturbation energies by the exact oracle, the parametric ratio, shooting and ghost regularisation."

    def add_arguments(self, parser):
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--perturbation", help='Even polynomial perturbation, e.g. "1/2 x^2 + x^4"')
        common.add_argument("--order", type=int, help="Highest order n to evaluate")
        common.add_argument("--xcut", type=float, help="Single cutoff X")
        common.add_argument("--xcut-grid", dest="xcut_grid", help="Cutoffs as start:stop:step or a comma list")
        common.add_argument("--sigma-grid", dest="sigma_grid", help="Comma list of ghost mixing parameters")
        common.add_argument("--tol", type=float, help="Relative quadrature tolerance")
        common.add_argument("--extrapolate", action="store_true", default=None,
                            help="Extrapolate ghost rows to sigma = 0")
        common.add_argument("--fit-model", dest="fit_model", help="linear, quadratic or residue")
        common.add_argument("--format", help="csv or json")
        common.add_argument("--output", help="Report path; the report goes to stdout when omitted")
        common.add_argument("--config", help="key = value file with defaults for the flags above")

        subparsers = parser.add_subparsers(dest="method", required=True)
        for method in METHODS:
            subparsers.add_parser(method, parents=[common], help=f"Run the {method} method")

    def handle(self, *args, **options):
        data = {}
        if options.get("config"):
            try:
                data.update(read_config_file(options["config"]))
            except ConfigurationError as exc:
                raise CommandError(str(exc), returncode=exc.exit_code)
        data.update({
            field: options[field] for field in OPTIONS.values()
            if options.get(field) is not None
        })
        data["method"] = options["method"]

        serializer = RunConfigSerializer(data=data)
        try:
            serializer.is_valid(raise_exception=True)
        except ValidationError as exc:
            raise CommandError(format_validation_error(exc.detail), returncode=CONFIG_EXIT_CODE)
        config = serializer.save()

        try:
            run(config, self.stdout)
        except PertlabError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)
