"""
Configuration settings for the inhomogeneous approximation lab.
Load budgets and paths from environment variables or .env file.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Base paths
BASE_DIR = Path(__file__).parent
OUTPUT_DIR = Path(os.getenv("LAB_OUTPUT_DIR", str(BASE_DIR / "results")))

# Output schema
SCHEMA_VERSION = "1.0"
APP_VERSION = "1.0.0"

# Budgets (keep desk machines from being wedged)
SIEVE_CEILING = int(os.getenv("LAB_SIEVE_CEILING", "20000000"))
PAIR_SCAN_BUDGET = int(os.getenv("LAB_PAIR_SCAN_BUDGET", "1000000"))  # N^2 pairs
SERIES_TERM_BUDGET = int(os.getenv("LAB_SERIES_TERM_BUDGET", "100000000"))
GCD_DIVISOR_BUDGET = int(os.getenv("LAB_GCD_DIVISOR_BUDGET", "20000"))

# Numerical defaults
BC_SERIES_TOL = float(os.getenv("LAB_BC_SERIES_TOL", "1e-6"))
DELTA_THRESHOLD = int(os.getenv("LAB_DELTA_THRESHOLD", "16"))
MERGE_EPS = 1e-14  # endpoint equality when merging arcs
MEASURE_ATOL = 1e-12

# Sampling
DEFAULT_SEED = int(os.getenv("LAB_SEED", "20240601"))
DEFAULT_SAMPLES = int(os.getenv("LAB_SAMPLES", "200"))
RNG_ALGORITHM = "numpy.Philox4x64/SeedSequence(seed,index)"

# Worker pool
WORKERS = int(os.getenv("LAB_WORKERS", "1"))

# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Keys a run file (KEY=VALUE) may use to override budgets for one run
BUDGET_KEYS = {
    "SIEVE_CEILING": "SIEVE_CEILING",
    "PAIR_SCAN_BUDGET": "PAIR_SCAN_BUDGET",
    "SERIES_TERM_BUDGET": "SERIES_TERM_BUDGET",
    "GCD_DIVISOR_BUDGET": "GCD_DIVISOR_BUDGET",
}


def budgets() -> dict:
    """Current budget values, as recorded in run manifests."""
    return {
        "SIEVE_CEILING": SIEVE_CEILING,
        "PAIR_SCAN_BUDGET": PAIR_SCAN_BUDGET,
        "SERIES_TERM_BUDGET": SERIES_TERM_BUDGET,
        "GCD_DIVISOR_BUDGET": GCD_DIVISOR_BUDGET,
    }


def apply_budget_overrides(overrides: dict) -> dict:
    """Override budget constants for the current process. Returns applied values."""
    applied = {}
    for key, attr in BUDGET_KEYS.items():
        if key in overrides and overrides[key] not in (None, ""):
            value = int(overrides[key])
            globals()[attr] = value
            applied[key] = value
    return applied


def validate_config():
    """Check that the configuration is usable."""
    problems = []

    for key, value in budgets().items():
        if value <= 0:
            problems.append(f"{key} must be positive (got {value})")
    if WORKERS < 1:
        problems.append(f"LAB_WORKERS must be >= 1 (got {WORKERS})")
    if LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        problems.append(f"LOG_LEVEL not recognised: {LOG_LEVEL}")

    # nearest existing ancestor of the output directory must be writable
    target = OUTPUT_DIR
    while not target.exists() and target != target.parent:
        target = target.parent
    if not target.is_dir() or not os.access(target, os.W_OK):
        problems.append(f"LAB_OUTPUT_DIR is not writable: {OUTPUT_DIR}")

    return problems


# Example .env file content
ENV_TEMPLATE = """
# Inhomogeneous approximation lab configuration
# Copy this to .env and adjust

# Where CSV/JSON results and manifests are written
LAB_OUTPUT_DIR=./results

# Budgets
LAB_SIEVE_CEILING=20000000
LAB_PAIR_SCAN_BUDGET=1000000
LAB_SERIES_TERM_BUDGET=100000000
LAB_GCD_DIVISOR_BUDGET=20000

# Monte Carlo defaults
LAB_SEED=20240601
LAB_SAMPLES=200

# Worker pool size
LAB_WORKERS=1

# Log level (DEBUG, INFO, WARNING, ERROR)
LOG_LEVEL=INFO
""".strip()
