import os
import shutil

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("SPECMON_CLI") or shutil.which("specmon")
    if not path:
        pytest.skip("specmon executable not available")
    return path


@pytest.fixture(scope="session")
def spec_path():
    path = os.environ.get("SPECMON_SPEC")
    if not path:
        path = os.path.join(os.path.dirname(__file__), "..", "..", "data", "water_tank.bspec")
    return os.path.abspath(path)
