"""
Report writers: plot-ready CSV, key=value summaries and structured JSON.

Numbers are written with 17 significant digits and no locale formatting, and
no timestamps are emitted, so identical inputs give byte-identical files.
"""
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence
import csv
import json
import logging

from pydantic import BaseModel

from reports.schemas import (
    ConvergenceReport, CounterexampleReport, PlanarOrbitReport, ReductionReport,
)

logger = logging.getLogger(__name__)

SEQUENCE_COLUMNS = ['k', 'eps_k', 't_k', 'a_k']
CONVERGENCE_COLUMNS = ['N', 'err', 'N_err', 'slope_running']
COUNTEREXAMPLE_COLUMNS = ['N', 'identity_err', 'limit_err', 'N_limit_err']
ORBIT_COLUMNS = ['n', 'pre_iterates', 'orbit_len', 'dev_z', 'dev_w', 'dev_max']
REDUCTION_COLUMNS = ['N', 'N_S', 'band', 'alpha_pairing']


def format_float(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):
        return ', '.join(format_float(v) for v in value)
    return f"{float(value):.17g}"


def _prepare(path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = _prepare(path)
    with path.open('w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        count = 0
        for row in rows:
            writer.writerow([format_float(v) for v in row])
            count += 1
    logger.info(f"Wrote {count} rows to {path}")
    return path


def write_key_values(path, report: BaseModel) -> Path:
    """One `key = value` line per report field, in field order."""
    path = _prepare(path)
    lines = [f"{key} = {format_float(getattr(report, key))}" for key in type(report).model_fields]
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    logger.info(f"Wrote {type(report).__name__} to {path}")
    return path


def write_structured(path, report: BaseModel, provenance: Dict) -> Path:
    """
    JSON document {"provenance": ..., "report": ...} with sorted keys.

    Floats use Python's shortest round-trip repr.
    """
    path = _prepare(path)
    document = {'provenance': provenance, 'report': report.model_dump(mode='json')}
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    logger.info(f"Wrote structured {type(report).__name__} to {path}")
    return path


def sequence_rows(seq, ts) -> List[tuple]:
    """(k, eps_k, t_k, a_k) for an EpsilonSequence and its TraceSequence."""
    return [(k, float(seq.eps[k - 1]), float(ts.t[k - 1]), float(ts.a[k - 1])) for k in range(1, seq.N + 1)]


def convergence_rows(report: ConvergenceReport) -> List[tuple]:
    return list(zip(report.Ns, report.errs, report.scaled, report.running_slope))


def counterexample_rows(report: CounterexampleReport) -> List[tuple]:
    return list(zip(report.Ns, report.identity_errs, report.limit_errs, report.limit_scaled))


def orbit_rows(report: PlanarOrbitReport) -> List[tuple]:
    return list(zip(report.n_values, report.pre_iterates, report.orbit_lengths,
                    report.dev_z, report.dev_w, report.deviations))


def reduction_rows(report: ReductionReport) -> List[tuple]:
    return list(zip(report.Ns, report.S_scaled, report.band, report.alpha_pairing))


def provenance(config, command: Optional[str] = None) -> Dict:
    """Everything needed to rerun a report: family, params, grid, precision, seed, command."""
    return {
        'command': command or config.command.value,
        'family': config.family.value if config.family else None,
        'grid': config.grid.model_dump(mode='json'),
        'params': config.effective_params().model_dump(mode='json'),
        'precision': config.precision.value,
        'seed': config.seed,
    }
