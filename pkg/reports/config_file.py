"""
Sectioned key=value experiment files.

    [experiment]   command, family, precision, seed, A_threshold
    [params]       m, A, C, seed, alpha_coeffs, tail, values
    [schedule]     N, Ns, n_values, multiplier, planar_map, z, w, offset, form
    [grid]         center, radius, points_per_side
    [output]       path, format

Lists are comma-separated, complex numbers use Python literals such as 0.1+0.2j.
"""
from configparser import ConfigParser
from pathlib import Path
from typing import Dict, List, Optional
import logging

from dynamics.errors import ValidationError
from reports.schemas import ExperimentConfig

logger = logging.getLogger(__name__)

# section -> [(file key, config attribute)]
LAYOUT: Dict[str, List[tuple]] = {
    'experiment': [('command', 'command'), ('family', 'family'), ('precision', 'precision'),
                   ('seed', 'seed'), ('A_threshold', 'A_threshold')],
    'schedule': [('N', 'N'), ('Ns', 'Ns'), ('n_values', 'n_values'), ('multiplier', 'multiplier'),
                 ('planar_map', 'planar_map'), ('z', 'z'), ('w', 'w'),
                 ('offset', 'offset'), ('form', 'form')],
    'output': [('path', 'output_path'), ('format', 'output_format')],
}
PARAM_KEYS = ['m', 'A', 'C', 'seed', 'alpha_coeffs', 'tail', 'values']
GRID_KEYS = ['center', 'radius', 'points_per_side']

LIST_KEYS = {'Ns', 'n_values', 'alpha_coeffs', 'values'}
INT_LIST_KEYS = {'Ns', 'n_values'}
COMPLEX_KEYS = {'z', 'w', 'center'}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in LIST_KEYS:
        items = [item.strip() for item in raw.split(',') if item.strip()]
        return [int(i) for i in items] if key in INT_LIST_KEYS else [float(i) for i in items]
    if key in COMPLEX_KEYS:
        return complex(raw.replace(' ', ''))
    return raw


def _format_value(value) -> str:
    if isinstance(value, (list, tuple)):
        return ', '.join(_format_value(v) for v in value)
    if isinstance(value, complex):
        return repr(value).strip('()')
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, 'value'):
        return str(value.value)
    return str(value)


def parse_config_text(text: str) -> ExperimentConfig:
    """
    Parse an experiment file into a validated ExperimentConfig.

    Raises:
        ValidationError: on entries outside the file layout
        pydantic.ValidationError: on malformed values
    """
    parser = ConfigParser()
    parser.optionxform = str  # keys are case-sensitive (N vs n)
    parser.read_string(text)

    data = {}
    for section, keys in LAYOUT.items():
        if not parser.has_section(section):
            continue
        for file_key, attribute in keys:
            if parser.has_option(section, file_key):
                data[attribute] = _parse_value(file_key, parser.get(section, file_key))
    if parser.has_section('params'):
        data['params'] = {k: _parse_value(k, v) for k, v in parser.items('params')}
    if parser.has_section('grid'):
        data['grid'] = {k: _parse_value(k, v) for k, v in parser.items('grid')}

    unknown = []
    for section in parser.sections():
        if section in LAYOUT:
            allowed = {k for k, _ in LAYOUT[section]}
            unknown += [f"{section}.{k}" for k in parser.options(section) if k not in allowed]
        elif section not in ('params', 'grid'):
            unknown.append(f"[{section}]")
    if unknown:
        raise ValidationError(f"unknown config entries: {', '.join(unknown)}")

    logger.debug(f"Parsed config sections: {parser.sections()}")
    return ExperimentConfig.model_validate(data)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    logger.info(f"Loading experiment config from {path}")
    return parse_config_text(path.read_text(encoding='utf-8'))


def dump_config(config: ExperimentConfig) -> str:
    """Serialize to the file format; parse_config_text(dump_config(c)) == c."""
    lines: List[str] = []
    for section, keys in LAYOUT.items():
        entries = [(k, getattr(config, attr)) for k, attr in keys]
        _append_section(lines, section, entries)
        if section == 'experiment':
            params = config.params.model_dump()
            _append_section(lines, 'params', [(k, params[k]) for k in PARAM_KEYS])
            grid = config.grid.model_dump()
            _append_section(lines, 'grid', [(k, grid[k]) for k in GRID_KEYS])
    return '\n'.join(lines).rstrip() + '\n'


def _append_section(lines: List[str], section: str, entries: List[tuple]):
    present = [(k, v) for k, v in entries if v is not None]
    if not present:
        return
    lines.append(f'[{section}]')
    for key, value in present:
        lines.append(f'{key} = {_format_value(value)}')
    lines.append('')


def save_config(config: ExperimentConfig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_config(config), encoding='utf-8')
    return path


def override(config: ExperimentConfig, **changes: Optional[object]) -> ExperimentConfig:
    """Copy with non-None changes applied and re-validated."""
    updates = {k: v for k, v in changes.items() if v is not None}
    if not updates:
        return config
    return ExperimentConfig.model_validate({**config.model_dump(), **updates})
