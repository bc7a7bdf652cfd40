import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "pertlab_project.settings")
django.setup()
