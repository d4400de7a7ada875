import os
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def course_dir():
    return Path(os.environ.get("COMMLAB_COURSE", ROOT / "course"))
