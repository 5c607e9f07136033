# -*- coding: utf-8 -*-
"""
``scene-descriptors <subcommand> [flags]``: hyphenated aliases of the app's management commands
"""
import logging
import os
import sys

logger = logging.getLogger(__name__)

PROG = 'scene-descriptors'

COMMANDS = {
    'gen-synthetic': 'gen_synthetic',
    'train-vae': 'train_vae',
    'encode': 'encode',
    'phog': 'phog',
    'random-desc': 'random_desc',
    'crop-desc': 'crop_desc',
    'train-probe': 'train_probe',
    'eval': 'eval',
    'bench': 'bench',
    'sample-poses': 'sample_poses',
    'traverse-latent': 'traverse_latent',
}

EXIT_OK = 0
EXIT_RUNTIME_ERROR = 1
EXIT_USAGE_ERROR = 2


def usage():
    return 'usage: {} {{{}}} [flags]\n'.format(PROG, ','.join(sorted(COMMANDS)))


def setup():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'scene_descriptors.standalone_settings')
    import django
    django.setup()

    from django.core.management import call_command
    from scene_descriptors import settings as scene_settings
    if scene_settings.SCENE_RECORD_RUNS:
        # The standalone database may be in memory
        call_command('migrate', verbosity=0, interactive=False)


def cli_dispatch(argv=None):
    """
    Runs one subcommand

    :param list argv: arguments after the program name
    :return int: exit code
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ('-h', '--help'):
        stream = sys.stdout if argv else sys.stderr
        stream.write(usage())
        return EXIT_OK if argv else EXIT_USAGE_ERROR

    subcommand = argv[0]
    if subcommand not in COMMANDS:
        sys.stderr.write(usage())
        sys.stderr.write('{}: unknown subcommand "{}"\n'.format(PROG, subcommand))
        return EXIT_USAGE_ERROR

    setup()
    from django.core.management import load_command_class
    command = load_command_class('scene_descriptors', COMMANDS[subcommand])
    try:
        # argparse and CommandError both end in SystemExit carrying the exit code
        command.run_from_argv([PROG, subcommand] + argv[1:])
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_RUNTIME_ERROR
    except Exception as e:
        logger.exception('{} {} failed: {}'.format(PROG, subcommand, e))
        return EXIT_RUNTIME_ERROR
    return EXIT_OK


def main():
    sys.exit(cli_dispatch())
