import json
from pathlib import Path

import pytest

from core.sphere import SphereQuadrature

CONFIG_DIR = Path(__file__).resolve().parent.parent / 'configs'


@pytest.fixture
def quad():
    return SphereQuadrature(32, 1e-12)


@pytest.fixture
def write_config(tmp_path):
    """Write a run configuration to a temporary JSON file and return its path."""

    def _write(data, name='run.json'):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path

    return _write


@pytest.fixture
def sample_configs():
    return sorted(CONFIG_DIR.glob('*.json'))
