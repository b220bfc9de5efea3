import logging
import os
from pathlib import Path
from dotenv import load_dotenv
from rich.logging import RichHandler

# Load environment variables
load_dotenv()

# Project Root
BASE_DIR = Path(__file__).resolve().parent.parent

# Monte-Carlo oracles
SEED = int(os.getenv('HARDYLAB_SEED', 20240517))
MC_SAMPLES = int(os.getenv('HARDYLAB_MC_SAMPLES', 1_000_000))

# Quadrature Settings
ANGULAR_NODES = int(os.getenv('HARDYLAB_ANGULAR_NODES', 32))
SPHERE_TOL = float(os.getenv('HARDYLAB_SPHERE_TOL', 1e-12))
RADIAL_NODES = int(os.getenv('HARDYLAB_RADIAL_NODES', 16))
PSI_NODES = int(os.getenv('HARDYLAB_PSI_NODES', 16))
LAMBDA_NODES = int(os.getenv('HARDYLAB_LAMBDA_NODES', 16))
SEMINORM_TOL = float(os.getenv('HARDYLAB_SEMINORM_TOL', 1e-6))
MAX_BISECTIONS = int(os.getenv('HARDYLAB_MAX_BISECTIONS', 40))

# Verification Settings
SLACK_TOL = float(os.getenv('HARDYLAB_SLACK_TOL', 1e-9))
LAMBDA_TOL = float(os.getenv('HARDYLAB_LAMBDA_TOL', 1e-6))
SWEEP_STEPS = int(os.getenv('HARDYLAB_SWEEP_STEPS', 8))
SWEEP_NOISE = 1e-3
SWEEP_TARGET_LOCAL = 0.95
SWEEP_TARGET_FRACTIONAL = 0.90

DEBUG = os.getenv('HARDYLAB_DEBUG', 'False').lower() == 'true'

# Output Directory
OUTPUT_DIR = Path(os.getenv('HARDYLAB_OUTPUT_DIR', str(BASE_DIR / 'output')))

# Report Formats
REPORT_FORMATS = ['csv', 'json']

CSV_HEADER = [
    'theorem', 'case', 'weight', 'N', 'p', 'alpha', 's', 'q',
    'value', 'bound', 'margin', 'holds', 'scheme', 'est_error'
]

# Theorem selectors understood by the verify and sweep commands
THEOREMS = {
    'ckn': 'Caffarelli-Kohn-Nirenberg weighted Hardy',
    'thm11': 'Sharp Hardy with angular weight (alpha = 0)',
    'thm12': 'Weighted Hardy, q(N, p) rule (empirical constant)',
    'thm13': 'Sharp weighted Hardy, p = 2',
    'thm31': 'Weighted Hardy via rearrangement',
    'thm14': 'Weighted fractional Hardy',
    'hardy1d': 'One-dimensional weighted Hardy lemma',
}

# Single defaults table, echoed into every report
DEFAULTS = {
    'seed': SEED,
    'mc_samples': MC_SAMPLES,
    'angular_nodes': ANGULAR_NODES,
    'sphere_tol': SPHERE_TOL,
    'radial_nodes': RADIAL_NODES,
    'psi_nodes': PSI_NODES,
    'lambda_nodes': LAMBDA_NODES,
    'seminorm_tol': SEMINORM_TOL,
    'max_bisections': MAX_BISECTIONS,
    'slack_tol': SLACK_TOL,
    'lambda_tol': LAMBDA_TOL,
    'sweep_steps': SWEEP_STEPS,
    'sweep_noise': SWEEP_NOISE,
    'sweep_target_local': SWEEP_TARGET_LOCAL,
    'sweep_target_fractional': SWEEP_TARGET_FRACTIONAL,
}


def configure_logging(debug: bool = DEBUG) -> None:
    """Route library logging through rich."""
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=debug, show_path=False)],
        force=True,
    )


def validate_settings():
    """Validate that the configured defaults are usable."""
    errors = []

    if ANGULAR_NODES < 8:
        errors.append("HARDYLAB_ANGULAR_NODES must be >= 8")
    if RADIAL_NODES < 2 or PSI_NODES < 2 or LAMBDA_NODES < 2:
        errors.append("Gauss node counts must be >= 2")
    for name, value in (('HARDYLAB_SPHERE_TOL', SPHERE_TOL),
                        ('HARDYLAB_SEMINORM_TOL', SEMINORM_TOL),
                        ('HARDYLAB_SLACK_TOL', SLACK_TOL),
                        ('HARDYLAB_LAMBDA_TOL', LAMBDA_TOL)):
        if not value > 0:
            errors.append(f"{name} must be > 0")
    if SWEEP_STEPS < 1:
        errors.append("HARDYLAB_SWEEP_STEPS must be >= 1")
    if MC_SAMPLES < 1000:
        errors.append("HARDYLAB_MC_SAMPLES must be >= 1000")

    if errors:
        raise ValueError(f"Configuration errors: {', '.join(errors)}")

    return True
