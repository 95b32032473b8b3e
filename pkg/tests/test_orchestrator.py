"""
Tests for config validation and the experiment orchestrator.
"""
import json

import pytest

from dynamics.errors import PoleError
from reports.schemas import Command, ExperimentConfig, Family, FamilyParams, GridSpec, OutputFormat
from runner.orchestrator import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, EXIT_UNEXPECTED, ExperimentOrchestrator
from runner.validation import validate


def _config(**kwargs) -> ExperimentConfig:
    return ExperimentConfig(**kwargs)


class TestValidation:

    def test_valid_rate_config(self):
        assert validate(_config(command=Command.RATE, family=Family.CONSTANT, Ns=[100, 200])) == []

    def test_family_required(self):
        violations = validate(_config(command=Command.RATE, Ns=[100]))
        assert "experiment.family required for rate" in violations

    def test_example_parity(self):
        violations = validate(_config(command=Command.CHECK, family=Family.EXAMPLE1, N=100))
        assert "Example1 requires N = 2m+1 (got N = 100)" in violations
        violations = validate(_config(command=Command.RATE, family=Family.EXAMPLE2, Ns=[102, 104]))
        assert violations == ["Example2 requires N = 4m+2 (got N = 104)"]

    def test_theorem7_needs_seed(self):
        violations = validate(_config(command=Command.RATE, family=Family.THEOREM7_BAND, Ns=[100]))
        assert any(v.startswith("seed required") for v in violations)
        assert validate(_config(command=Command.RATE, family=Family.THEOREM7_BAND, Ns=[100], seed=4)) == []

    def test_family_parameters_required(self):
        assert "params.A required for Theorem5Linear" in validate(
            _config(command=Command.RATE, family=Family.THEOREM5_LINEAR, Ns=[100]))
        assert "params.values required for Custom" in validate(
            _config(command=Command.COMPOSE, family=Family.CUSTOM, N=3))

    def test_schedule_required(self):
        assert "schedule.N required for compose" in validate(_config(command=Command.COMPOSE, family=Family.CONSTANT))
        assert "schedule.Ns required for rate" in validate(_config(command=Command.RATE, family=Family.CONSTANT))

    def test_planar_rules(self):
        violations = validate(_config(command=Command.PLANAR, planar_map='K'))
        assert "schedule.n_values required for planar" in violations
        assert any("planar_map must be H or L" in v for v in violations)

    def test_baseline_rules(self):
        violations = validate(_config(command=Command.BASELINE, N=1, offset=2.0, form='secant'))
        assert len(violations) == 3

    def test_grid_must_avoid_pole(self):
        violations = validate(_config(command=Command.RATE, family=Family.CONSTANT, Ns=[100],
                                      grid=GridSpec(center=0.8 + 0j, radius=0.3)))
        assert violations == ["grid touches fiber pole z = 1 (center (0.8+0j), radius 0.3)"]

    def test_generator_dry_run(self):
        # pi/3 > 1, so eps_k leaves (0, 1)
        violations = validate(_config(command=Command.RATE, family=Family.CONSTANT, Ns=[3, 100]))
        assert len(violations) == 1
        assert violations[0].startswith("Constant at N = 3")


class TestOrchestrator:

    @pytest.fixture
    def orchestrator(self, out_dir):
        return ExperimentOrchestrator(output_dir=out_dir)

    def test_check_writes_key_value_report(self, orchestrator, out_dir):
        config = _config(command=Command.CHECK, family=Family.EXAMPLE1, params=FamilyParams(m=50))
        result = orchestrator.run(config)
        assert result.exit_code == EXIT_OK
        assert result.summary == "check Example1 N=101: verdict_S=PASS verdict_band=PASS"
        assert result.files == [out_dir / "check_Example1_N101.txt"]
        text = result.files[0].read_text()
        assert "verdict_S = true" in text

    def test_compose_writes_report_and_sequence(self, orchestrator, out_dir):
        result = orchestrator.run(_config(command=Command.COMPOSE, family=Family.CONSTANT, N=50))
        assert result.exit_code == EXIT_OK
        assert result.summary.startswith("compose Constant N=50: map_error=")
        sequence_csv = out_dir / "compose_Constant_N50_sequence.csv"
        assert sequence_csv in result.files
        lines = sequence_csv.read_text().splitlines()
        assert lines[0] == "k,eps_k,t_k,a_k"
        assert len(lines) == 51

    def test_rate_csv_is_reproducible(self, orchestrator, out_dir):
        config = _config(command=Command.RATE, family=Family.THEOREM7_BAND, seed=5, Ns=[100, 200])
        first = orchestrator.run(config)
        content = first.files[0].read_bytes()
        second = orchestrator.run(config)
        assert first.files == second.files == [out_dir / "rate_Theorem7Band.csv"]
        assert second.files[0].read_bytes() == content
        header, row, _ = content.decode().split('\n', 2)
        assert header == "N,err,N_err,slope_running"
        assert row.startswith("100,") and row.endswith(",")

    def test_structured_output_has_provenance(self, orchestrator):
        config = _config(command=Command.RATE, family=Family.CONSTANT, Ns=[100, 200],
                         output_format=OutputFormat.STRUCTURED)
        result = orchestrator.run(config)
        document = json.loads(result.files[0].read_text())
        assert result.files[0].suffix == '.json'
        assert set(document['provenance']) == {'command', 'family', 'grid', 'params', 'precision', 'seed'}
        assert document['provenance']['family'] == 'Constant'
        assert document['report']['Ns'] == [100, 200]

    def test_counterexample_summary(self, orchestrator):
        result = orchestrator.run(_config(command=Command.COUNTEREXAMPLE, Ns=[100, 200]))
        assert result.exit_code == EXIT_OK
        assert "verdict_S=FAIL verdict_band=PASS" in result.summary
        assert result.files[0].name == "counterexample_Counterexample.csv"

    def test_identities_reduction_and_baseline(self, orchestrator):
        identities = orchestrator.run(_config(command=Command.IDENTITIES, family=Family.EXAMPLE1,
                                              params=FamilyParams(m=20)))
        assert identities.summary == "identities Example1 N=41: PASS"
        reduction = orchestrator.run(_config(command=Command.REDUCTION, family=Family.ALPHA_FORM,
                                             params=FamilyParams(alpha_coeffs=[0.0, 1.5, 0.0, -0.5]),
                                             Ns=[101, 201], A_threshold=50.0))
        assert reduction.exit_code == EXIT_OK
        assert reduction.summary.endswith("PASS")
        baseline = orchestrator.run(_config(command=Command.BASELINE, N=200, offset=0.5))
        assert baseline.files[0].name == "baseline_angle_N200.csv"

    def test_planar_run(self, orchestrator):
        result = orchestrator.run(_config(command=Command.PLANAR, planar_map='L', n_values=[5, 10]))
        assert result.exit_code == EXIT_OK
        assert result.files[0].name == "planar_L.csv"

    def test_invalid_config_exits_2(self, orchestrator):
        result = orchestrator.run(_config(command=Command.CHECK, family=Family.EXAMPLE1, N=100))
        assert result.exit_code == EXIT_INVALID
        assert result.violations == ["Example1 requires N = 2m+1 (got N = 100)"]

    def test_point_outside_basin_exits_2(self, orchestrator):
        result = orchestrator.run(_config(command=Command.PLANAR, w=-2 + 0j, n_values=[5]))
        assert result.exit_code == EXIT_INVALID
        assert "parabolic basin" in result.summary

    def test_numerical_failure_exits_3(self, orchestrator):
        def _explode(config):
            raise PoleError(1.0, 0.0)
        orchestrator.handlers[Command.COMPOSE] = _explode
        result = orchestrator.run(_config(command=Command.COMPOSE, family=Family.CONSTANT, N=50))
        assert result.exit_code == EXIT_NUMERICAL
        assert result.summary.startswith("numerical failure")

    def test_unexpected_failure_exits_1(self, orchestrator):
        def _explode(config):
            raise RuntimeError("boom")
        orchestrator.handlers[Command.RATE] = _explode
        result = orchestrator.run(_config(command=Command.RATE, family=Family.CONSTANT, Ns=[100]))
        assert result.exit_code == EXIT_UNEXPECTED

    def test_run_file_applies_overrides(self, orchestrator, write_config, out_dir):
        path = write_config("[experiment]\ncommand = check\nfamily = Counterexample\n\n[schedule]\nN = 200\n")
        result = orchestrator.run_file('check', path, precision='ext', seed=None)
        assert result.exit_code == EXIT_OK
        assert "verdict_S=FAIL verdict_band=PASS" in result.summary

    def test_run_file_validate_command(self, orchestrator, write_config):
        path = write_config("[experiment]\ncommand = rate\nfamily = Example2\n\n[schedule]\nNs = 100\n")
        result = orchestrator.run_file('validate', path)
        assert result.exit_code == EXIT_INVALID
        assert result.violations == ["Example2 requires N = 4m+2 (got N = 100)"]

    def test_run_file_missing_or_malformed(self, orchestrator, write_config, tmp_path):
        assert orchestrator.run_file('rate', tmp_path / 'missing.cfg').exit_code == EXIT_INVALID
        path = write_config("[experiment]\ncommand = rate\nunknown = 1\n")
        assert orchestrator.run_file('rate', path).exit_code == EXIT_INVALID
