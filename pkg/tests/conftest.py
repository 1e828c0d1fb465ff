from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from braitenberg.circuits import data_path

settings.register_profile("default", max_examples=150, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def data():
    return data_path
