"""
Shared fixtures for the test suite.
"""
import logging
import os

os.environ.setdefault('SKIP_CONFIG_VALIDATION', 'true')

import pytest

from dynamics.moebius import default_grid
from dynamics.precision import Precision
from reports.schemas import GridSpec


@pytest.fixture(autouse=True)
def restore_root_logger():
    """setup_logging replaces root handlers; put the test runner's back."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def std():
    return Precision.STANDARD


@pytest.fixture
def ext():
    return Precision.EXTENDED


@pytest.fixture
def grid_spec():
    return GridSpec()


@pytest.fixture
def grid():
    """Default compact set: 10x10 grid on |z| <= 0.5."""
    return default_grid()


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / 'out'
    return path


@pytest.fixture
def write_config(tmp_path):
    """Write experiment-file text to a temp file and return its path."""
    def _write(text: str, name: str = 'experiment.cfg'):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return path
    return _write
