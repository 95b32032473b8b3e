"""
Main entry point for the parabolic bifurcation experiment runner.

    parabifurc COMMAND --config PATH [--out DIR] [--precision std|ext] [--seed N]

Loads the experiment file, applies command-line overrides, runs the
experiment, writes its report files and exits with 0 (success),
2 (invalid config), 3 (numerical failure) or 1 (unexpected error).
"""
import logging
import sys

import click

from config import settings
from config.logging_config import setup_logging
from reports.schemas import Command
from runner.orchestrator import EXIT_INVALID, EXIT_UNEXPECTED, ExperimentOrchestrator

logger = logging.getLogger(__name__)


@click.command(context_settings={'help_option_names': ['-h', '--help']})
@click.argument('command', type=click.Choice([c.value for c in Command]))
@click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False),
              help="Experiment file (sectioned key=value)")
@click.option('--out', 'output_dir', type=click.Path(file_okay=False), default=None,
              help="Report directory, overrides [output] path")
@click.option('--precision', type=click.Choice(['std', 'ext']), default=None,
              help="Arithmetic: binary64 or extended")
@click.option('--seed', type=click.IntRange(min=0), default=None, help="Seed for randomized families")
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
              default=None, help="Overrides LOG_LEVEL")
@click.option('--workers', type=click.IntRange(min=1), default=None,
              help="Threads for independent N values")
def cli(command, config_path, output_dir, precision, seed, log_level, workers):
    """Run one parabolic bifurcation experiment."""
    setup_logging(level=log_level)
    try:
        settings.validate_config()
    except ValueError as e:
        logger.error(f"Configuration error: {e}")
        click.echo(f"Configuration error: {e}", err=True)
        sys.exit(EXIT_INVALID)

    try:
        orchestrator = ExperimentOrchestrator(output_dir=output_dir, workers=workers)
        result = orchestrator.run_file(command, config_path, precision=precision, seed=seed)
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        click.echo(f"Fatal error: {e}", err=True)
        sys.exit(EXIT_UNEXPECTED)

    for violation in result.violations:
        click.echo(violation)
    click.echo(result.summary)
    for path in result.files:
        logger.debug(f"Report file: {path}")
    sys.exit(result.exit_code)


if __name__ == '__main__':
    cli()
