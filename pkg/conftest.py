import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cantordim_project.settings')
django.setup()
