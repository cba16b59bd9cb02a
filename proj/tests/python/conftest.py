import os
import shutil

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("CHESHIRE_CLI") or shutil.which("cheshire")
    if not path:
        pytest.skip("cheshire executable not available")
    return path
