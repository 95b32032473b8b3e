"""
Experiment orchestrator - routes a command to its experiment and report writer.

Every run ends in an exit code:
    0  success (a FAIL verdict is a result, not an error)
    2  invalid configuration
    3  numerical failure (pole, divergence, inconsistent paths)
    1  anything unexpected
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional
import configparser
import logging

import pydantic

from config import settings
from dynamics.errors import NumericalError, ValidationError
from dynamics.experiments import (
    autonomous_baseline, composition_report, convergence_experiment,
    counterexample_experiment, identity_suite,
)
from dynamics.planar import PlanarMap, corollary_experiment
from dynamics.sequences import a_coefficients, check_conditions, generate, theorem1_reduction
from reports import export
from reports.config_file import load_config, override
from reports.schemas import Command, ExperimentConfig, OutputFormat
from runner.validation import validate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


@dataclass
class RunResult:
    exit_code: int
    summary: str
    files: List[Path] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)


def _verdict(flag: bool) -> str:
    return 'PASS' if flag else 'FAIL'


def _n_range(Ns: List[int]) -> str:
    return f"N={Ns[0]}" if len(Ns) == 1 else f"N={Ns[0]}..{Ns[-1]}"


class ExperimentOrchestrator:
    """
    Routes an ExperimentConfig to the experiment for its command.

    Commands:
    - compose → composition_report()
    - check → check_conditions()
    - rate → convergence_experiment()
    - counterexample → counterexample_experiment()
    - identities → identity_suite()
    - planar → corollary_experiment()
    - baseline → autonomous_baseline()
    - reduction → theorem1_reduction()
    - validate → validate() only
    """

    def __init__(self, output_dir=None, workers: int = None):
        self.output_dir = Path(output_dir) if output_dir else None
        self.workers = workers or settings.WORKERS
        self.handlers: Dict[Command, Callable[[ExperimentConfig], RunResult]] = {
            Command.COMPOSE: self._compose,
            Command.CHECK: self._check,
            Command.RATE: self._rate,
            Command.COUNTEREXAMPLE: self._counterexample,
            Command.IDENTITIES: self._identities,
            Command.PLANAR: self._planar,
            Command.BASELINE: self._baseline,
            Command.REDUCTION: self._reduction,
        }

    def run_file(self, command, path, **overrides) -> RunResult:
        """Load a config file, apply CLI overrides and run it."""
        try:
            config = load_config(path)
            if command is not None and Command(command) is not Command.VALIDATE:
                overrides['command'] = Command(command)
            config = override(config, **overrides)
        except (ValidationError, pydantic.ValidationError, ValueError, configparser.Error) as e:
            logger.error(f"Invalid config {path}: {e}")
            return RunResult(EXIT_INVALID, f"invalid config: {e}")
        except OSError as e:
            logger.error(f"Cannot read config {path}: {e}")
            return RunResult(EXIT_INVALID, f"cannot read config: {e}")
        if command is not None and Command(command) is Command.VALIDATE:
            return self.validate_only(config)
        return self.run(config)

    def validate_only(self, config: ExperimentConfig) -> RunResult:
        violations = validate(config)
        if violations:
            return RunResult(EXIT_INVALID, f"{len(violations)} violation(s): " + '; '.join(violations),
                             violations=violations)
        return RunResult(EXIT_OK, f"{config.command.value} config is valid")

    def run(self, config: ExperimentConfig) -> RunResult:
        """
        Validate and run one experiment.

        Returns:
            RunResult with the exit code, a one-line summary and the files written
        """
        if config.command is Command.VALIDATE:
            return self.validate_only(config)

        violations = validate(config)
        if violations:
            for violation in violations:
                logger.error(f"Config violation: {violation}")
            return RunResult(EXIT_INVALID, "invalid config: " + '; '.join(violations), violations=violations)

        logger.info(f"Running {config.command.value} ({config.family.value if config.family else 'no family'}, "
                    f"{config.precision.value} precision)")
        try:
            return self.handlers[config.command](config)
        except (ValidationError, pydantic.ValidationError) as e:
            logger.error(f"Validation failed during {config.command.value}: {e}")
            return RunResult(EXIT_INVALID, f"invalid input: {e}")
        except NumericalError as e:
            logger.error(f"Numerical failure during {config.command.value}: {e}")
            return RunResult(EXIT_NUMERICAL, f"numerical failure: {e}")
        except Exception as e:
            logger.error(f"Unexpected error during {config.command.value}: {e}", exc_info=True)
            return RunResult(EXIT_UNEXPECTED, f"error: {e}")

    # Output helpers

    def _directory(self, config: ExperimentConfig) -> Path:
        if self.output_dir is not None:
            return self.output_dir
        if config.output_path:
            return Path(config.output_path)
        return settings.OUTPUT_DIR

    def _stem(self, config: ExperimentConfig, suffix: str = '') -> str:
        subject = config.family.value if config.family else config.planar_map
        if config.command is Command.COUNTEREXAMPLE:
            subject = 'Counterexample'
        return f"{config.command.value}_{subject}{suffix}"

    def _write(self, config: ExperimentConfig, report, stem: str,
               columns: Optional[List[str]] = None, rows=None) -> List[Path]:
        """CSV (or key=value when there are no rows) or structured JSON."""
        directory = self._directory(config)
        if config.output_format is OutputFormat.STRUCTURED:
            return [export.write_structured(directory / f"{stem}.json", report, export.provenance(config))]
        if columns is None:
            return [export.write_key_values(directory / f"{stem}.txt", report)]
        return [export.write_csv(directory / f"{stem}.csv", columns, rows)]

    # Handlers

    def _sequence(self, config: ExperimentConfig):
        return generate(config.family, config.effective_params(), config.N, config.precision)

    def _compose(self, config: ExperimentConfig) -> RunResult:
        seq = self._sequence(config)
        report = composition_report(seq, config.grid)
        stem = self._stem(config, f"_N{seq.N}")
        files = self._write(config, report, stem)
        if config.output_format is OutputFormat.CSV:
            files += self._write(config, report, f"{stem}_sequence", export.SEQUENCE_COLUMNS,
                                 export.sequence_rows(seq, a_coefficients(seq)))
        summary = (f"compose {seq.family.value} N={seq.N}: map_error={report.map_error:.6g} "
                   f"matrix_error={report.matrix_error:.6g}")
        return RunResult(EXIT_OK, summary, files)

    def _check(self, config: ExperimentConfig) -> RunResult:
        seq = self._sequence(config)
        report = check_conditions(seq, config.A_threshold)
        files = self._write(config, report, self._stem(config, f"_N{seq.N}"))
        summary = (f"check {seq.family.value} N={seq.N}: verdict_S={_verdict(report.verdict_S)} "
                   f"verdict_band={_verdict(report.verdict_band)}")
        return RunResult(EXIT_OK, summary, files)

    def _rate(self, config: ExperimentConfig) -> RunResult:
        Ns = config.schedule() or [generate(config.family, config.effective_params(), None).N]
        report = convergence_experiment(config.family, config.effective_params(), Ns, config.grid,
                                        config.precision, self.workers)
        files = self._write(config, report, self._stem(config), export.CONVERGENCE_COLUMNS,
                            export.convergence_rows(report))
        summary = f"rate {config.family.value} {_n_range(report.Ns)}: fit_C={report.fit_C:.6g}"
        if report.fit_slope is not None:
            summary += f" fit_slope={report.fit_slope:.4f}"
        return RunResult(EXIT_OK, summary, files)

    def _counterexample(self, config: ExperimentConfig) -> RunResult:
        report = counterexample_experiment(config.schedule(), config.grid, config.precision, config.A_threshold)
        files = self._write(config, report, self._stem(config), export.COUNTEREXAMPLE_COLUMNS,
                            export.counterexample_rows(report))
        verdict_S = all(r.verdict_S for r in report.condition_reports)
        verdict_band = all(r.verdict_band for r in report.condition_reports)
        summary = (f"counterexample {_n_range(report.Ns)}: limit_C={report.limit_C:.6g} "
                   f"min identity_err={min(report.identity_errs):.6g} "
                   f"verdict_S={_verdict(verdict_S)} verdict_band={_verdict(verdict_band)}")
        return RunResult(EXIT_OK, summary, files)

    def _identities(self, config: ExperimentConfig) -> RunResult:
        seq = self._sequence(config)
        report = identity_suite(seq)
        files = self._write(config, report, self._stem(config, f"_N{seq.N}"))
        summary = f"identities {seq.family.value} N={seq.N}: {_verdict(report.passed)}"
        return RunResult(EXIT_OK, summary, files)

    def _planar(self, config: ExperimentConfig) -> RunResult:
        planar_map = PlanarMap.by_name(config.planar_map, config.precision)
        report = corollary_experiment(planar_map, config.z, config.w, config.n_values, config.multiplier)
        files = self._write(config, report, self._stem(config), export.ORBIT_COLUMNS, export.orbit_rows(report))
        summary = (f"planar {planar_map.name} n={report.n_values[0]}..{report.n_values[-1]}: "
                   f"final deviation={report.deviations[-1]:.6g}")
        return RunResult(EXIT_OK, summary, files)

    def _baseline(self, config: ExperimentConfig) -> RunResult:
        report = autonomous_baseline(config.N, config.offset, config.form, config.grid, config.precision)
        stem = f"baseline_{config.form}_N{config.N}"
        files = self._write(config, report, stem, export.CONVERGENCE_COLUMNS, export.convergence_rows(report))
        summary = f"baseline N={config.N} offset={config.offset:g} form={config.form}: err={report.errs[0]:.6g}"
        return RunResult(EXIT_OK, summary, files)

    def _reduction(self, config: ExperimentConfig) -> RunResult:
        Ns = config.schedule() or [generate(config.family, config.effective_params(), None).N]
        report = theorem1_reduction(config.family, config.effective_params(), Ns, config.precision,
                                    config.A_threshold)
        files = self._write(config, report, self._stem(config), export.REDUCTION_COLUMNS,
                            export.reduction_rows(report))
        summary = (f"reduction {config.family.value} {_n_range(report.Ns)}: max N*S={report.max_S_scaled:.6g} "
                   f"max band={report.max_band:.6g} {_verdict(report.passes)}")
        return RunResult(EXIT_OK, summary, files)
