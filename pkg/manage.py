#!/usr/bin/env python
"""
Entrada de linha de comando do projeto.

    python manage.py mve quadrado.json --method cop
    python manage.py random_polytopes --K 2 --M 2 --count 50
    python manage.py chipped --k-max 10
    python manage.py dro examples | inventory
    python manage.py reach --T 8
    python manage.py selftest [--full]
    python manage.py test elipsoides
"""
import os
import sys


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "app.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError("Django não encontrado: instale as dependências de requirements.txt") from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
