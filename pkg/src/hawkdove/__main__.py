# -*- coding: utf-8 -*-

from hawkdove.cli import run_cli

run_cli()
