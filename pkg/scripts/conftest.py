import os
import sys

# Add the backend directory to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "backend"))

import pytest

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), "scenarios")


@pytest.fixture
def scenario_path():
    def resolve(name: str) -> str:
        return os.path.join(SCENARIO_DIR, name)

    return resolve
