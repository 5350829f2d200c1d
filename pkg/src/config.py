"""
Configuration settings for weavelab
"""

import os
from typing import List, Tuple

# Application metadata
APP_NAME = "weavelab"
APP_VERSION = "1.0.0"
APP_SUBTITLE = "Weaving-frame laboratory for C^d"

# Linear algebra tolerances (relative to max(1, ||M||_F) unless noted)
HERM_TOL = 1e-9
PD_TOL = 1e-10                  # relative to the largest eigenvalue
BORDERLINE_FACTOR = 10          # lambda_min within this many pd_tol is flagged

# Identity record tolerances (relative to the record scale)
EQ_TOL = 1e-9
INEQ_TOL = 1e-9

# Hypothesis checks
PARSEVAL_TOL = 1e-8             # ||S_W - I||_F for 1-woven partitions
TIGHT_TOL = 1e-8                # ||S_W - A I||_F <= TIGHT_TOL * A
DUAL_TOL = 1e-8                 # operator residual accepted for an alternate dual

# Woven certification
DEFAULT_MAX_N = 14
DEFAULT_WORKERS = 1

# Generators
FRAME_KINDS = ['onb', 'random', 'dft', 'mercedes', 'woven_pair']
DEFAULT_DIM = 2
DEFAULT_COUNT = 4
DEFAULT_EPSILON = 0.05
GENERATION_RETRIES = 8
RNG_NAME = "numpy.random.PCG64"

# Verification defaults
DEFAULT_LAMBDA_GRID = (-1.0, 0.0, 0.5, 1.0, 2.0, 3.0)
DEFAULT_TRIALS = 20
DEFAULT_SEED = 0
SIGMA_MODES = ['all', 'random']
DEFAULT_SIGMA_SAMPLES = 64

# Identity tags, in report order
THEOREM_IDS = [
    'operator_identity',
    'quadratic_bound',
    'cross_bound',
    'commuting_pair',
    'parseval_weaving',
    'general_weaving',
    'sandwich',
    'double',
    'tight_chain',
    'altdual_real',
    'altdual_complex',
    'altdual_weighted',
]

# Reports
REPORT_SCHEMA = 1
SWEEP_CSV_COLUMNS = ['lambda', 'theorem', 'min_slack', 'max_residual', 'trials']

# Exit codes
EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PRECONDITION = 2

# Environment
SEED_ENV_VAR = "WFL_SEED"
LOG_LEVEL_ENV_VAR = "WFL_LOG_LEVEL"

# Logging
LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def get_default_seed() -> int:
    """Seed used when no --seed flag is given (WFL_SEED, then DEFAULT_SEED)"""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or not raw.strip():
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def get_log_level() -> str:
    """Log level name, overridable through WFL_LOG_LEVEL"""
    level = os.environ.get(LOG_LEVEL_ENV_VAR, LOG_LEVEL).upper()
    if level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
        return LOG_LEVEL
    return level


def parse_lambda_list(text: str) -> List[float]:
    """
    Parse a comma separated list of reals ("-1,0,0.5")

    Args:
        text: Raw flag value

    Returns:
        List of floats, in the order given. Empty input gives an empty list.
    """
    values = []
    for part in text.split(','):
        part = part.strip()
        if part:
            values.append(float(part))
    return values


def parse_sigma_mode(text: str) -> Tuple[str, int]:
    """
    Parse "all", "random" or "random:K"

    Returns:
        (mode, sample count); the count is 0 for "all"
    """
    mode, _, count = text.strip().partition(':')
    if mode not in SIGMA_MODES:
        raise ValueError(f"Unknown sigma mode {text!r}; expected 'all', 'random' or 'random:K'")
    if mode == 'all':
        if count:
            raise ValueError("sigma mode 'all' takes no sample count")
        return mode, 0
    return mode, int(count) if count else DEFAULT_SIGMA_SAMPLES
