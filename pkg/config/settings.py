"""
Configuration settings loaded from environment variables.
"""
import os
from dotenv import load_dotenv
from pathlib import Path

# Load environment variables from .env file
env_path = Path(__file__).parent.parent / '.env'
load_dotenv(dotenv_path=env_path)

# Logging Configuration
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
LOG_FORMAT = os.getenv('LOG_FORMAT', 'text')  # 'text' or 'json'

# Numerical precision
PRECISION = os.getenv('PARABIFURC_PRECISION', 'std')  # 'std' or 'ext'
EXTENDED_PRECISION_BITS = int(os.getenv('EXTENDED_PRECISION_BITS', '128'))
# a_k is computed at extended precision above this N regardless of PRECISION
EXTENDED_THRESHOLD_N = int(os.getenv('EXTENDED_THRESHOLD_N', '512'))

# Moebius evaluation
POLE_RTOL = float(os.getenv('POLE_RTOL', '1e-12'))

# Parabolic basin of g(w) = w - w^2 + w^3
DIVERGENCE_RADIUS = float(os.getenv('DIVERGENCE_RADIUS', '10.0'))
BASIN_RADIUS = float(os.getenv('BASIN_RADIUS', '1e-3'))

# Convergence-condition constant A; empty falls back to sequences.DEFAULT_A_THRESHOLD
A_THRESHOLD = os.getenv('A_THRESHOLD') or None

# Runner
WORKERS = int(os.getenv('WORKERS', '1'))

# Project Paths
PROJECT_ROOT = Path(__file__).parent.parent
OUTPUT_DIR = Path(os.getenv('OUTPUT_DIR', str(PROJECT_ROOT / 'reports' / 'out')))
CONFIGS_PATH = PROJECT_ROOT / 'configs'


# Validate critical configuration
def validate_config():
    """Validate that numerical configuration is usable."""
    problems = []

    if PRECISION not in ('std', 'ext'):
        problems.append('PARABIFURC_PRECISION (std or ext)')
    if EXTENDED_PRECISION_BITS < 128:
        problems.append('EXTENDED_PRECISION_BITS (at least 128)')
    if EXTENDED_THRESHOLD_N < 1:
        problems.append('EXTENDED_THRESHOLD_N (positive)')
    if not POLE_RTOL > 0:
        problems.append('POLE_RTOL (positive)')
    if not 0 < BASIN_RADIUS < DIVERGENCE_RADIUS:
        problems.append('BASIN_RADIUS / DIVERGENCE_RADIUS (0 < basin < divergence)')
    if A_THRESHOLD is not None:
        try:
            if float(A_THRESHOLD) <= 0:
                problems.append('A_THRESHOLD (positive)')
        except ValueError:
            problems.append('A_THRESHOLD (number)')
    if WORKERS < 1:
        problems.append('WORKERS (at least 1)')
    if LOG_FORMAT not in ('text', 'json'):
        problems.append('LOG_FORMAT (text or json)')

    if problems:
        raise ValueError(
            f"Invalid environment variables: {', '.join(problems)}\n"
            f"Please fix your .env file (see .env.example)"
        )


def a_threshold():
    """Configured condition constant A, or None when it should be derived."""
    return float(A_THRESHOLD) if A_THRESHOLD is not None else None


# Run validation when module is imported (can be disabled for testing)
if os.getenv('SKIP_CONFIG_VALIDATION') != 'true':
    try:
        validate_config()
    except ValueError as e:
        print(f"Warning: {e}")
