"""
Pre-flight checks for an ExperimentConfig.

validate() never raises; each violation names the field and the constraint.
"""
from typing import List
import logging

from dynamics.errors import ParabifurcError
from dynamics.sequences import generate
from reports.schemas import Command, ExperimentConfig, Family

logger = logging.getLogger(__name__)

# Commands that build eps-sequences from a family
FAMILY_COMMANDS = {Command.COMPOSE, Command.CHECK, Command.RATE, Command.IDENTITIES, Command.REDUCTION}
SINGLE_N_COMMANDS = {Command.COMPOSE, Command.CHECK, Command.IDENTITIES}


def _family_rules(config: ExperimentConfig) -> List[str]:
    family = config.family
    params = config.effective_params()
    violations = []
    if family is Family.THEOREM7_BAND and params.seed is None:
        violations.append("seed required (Theorem7Band draws its band offsets from a seeded generator)")
    if family is Family.THEOREM5_LINEAR and params.A is None:
        violations.append("params.A required for Theorem5Linear")
    if family is Family.CUSTOM and not params.values:
        violations.append("params.values required for Custom")
    for N in config.schedule():
        if family is Family.EXAMPLE1 and (N < 1 or N % 2 != 1):
            violations.append(f"Example1 requires N = 2m+1 (got N = {N})")
        if family is Family.EXAMPLE2 and (N < 2 or N % 4 != 2):
            violations.append(f"Example2 requires N = 4m+2 (got N = {N})")
    return violations


def _schedule_rules(config: ExperimentConfig) -> List[str]:
    command = config.command
    violations = []
    has_m = config.family in (Family.EXAMPLE1, Family.EXAMPLE2) and config.params.m is not None
    has_values = config.family is Family.CUSTOM and bool(config.params.values)
    if command in SINGLE_N_COMMANDS and config.N is None and not (has_m or has_values):
        violations.append(f"schedule.N required for {command.value}")
    if command in (Command.RATE, Command.REDUCTION, Command.COUNTEREXAMPLE) and not config.schedule() and not has_m:
        violations.append(f"schedule.Ns required for {command.value}")
    if any(N < 1 for N in config.Ns or []):
        violations.append("schedule.Ns entries must be positive")
    if command is Command.COUNTEREXAMPLE and any(N < 3 for N in config.schedule()):
        violations.append("schedule.Ns entries must be at least 3 for the counterexample (eps_k < 1)")
    if command is Command.PLANAR:
        if not config.n_values:
            violations.append("schedule.n_values required for planar")
        elif any(n < 1 for n in config.n_values):
            violations.append("schedule.n_values entries must be positive")
        if config.planar_map not in ('H', 'L'):
            violations.append(f"schedule.planar_map must be H or L (got {config.planar_map!r})")
    if command is Command.BASELINE:
        if config.N is None or config.N < 2:
            violations.append("schedule.N must be at least 2 for baseline")
        if abs(config.offset) > 1:
            violations.append(f"schedule.offset must lie in [-1, 1] (got {config.offset})")
        if config.form not in ('angle', 'chord'):
            violations.append(f"schedule.form must be angle or chord (got {config.form!r})")
    return violations


def _grid_rules(config: ExperimentConfig) -> List[str]:
    grid = config.grid
    # f_0 and every product's first factor have their pole at z = 1
    if abs(1 - grid.center) <= grid.radius:
        return [f"grid touches fiber pole z = 1 (center {grid.center}, radius {grid.radius})"]
    return []


def validate(config: ExperimentConfig) -> List[str]:
    """
    List every reason the config cannot run.

    Returns:
        Empty list iff the config is runnable
    """
    violations = []
    if config.command in FAMILY_COMMANDS and config.family is None:
        violations.append(f"experiment.family required for {config.command.value}")
    violations += _schedule_rules(config)
    violations += _grid_rules(config)
    if config.family is not None and config.command in FAMILY_COMMANDS:
        violations += _family_rules(config)

    if not violations and config.family is not None and config.command in FAMILY_COMMANDS:
        # Dry-run the generator for the family's remaining constraints (eps_k in (0, 1))
        schedule = config.schedule() or [None]
        for N in schedule:
            try:
                generate(config.family, config.effective_params(), N, config.precision)
            except (ParabifurcError, ValueError) as e:
                violations.append(f"{config.family.value} at N = {N}: {e}")

    for violation in violations:
        logger.debug(f"Config violation: {violation}")
    return violations
