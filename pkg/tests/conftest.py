from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def paper_test1_path() -> Path:
    return REPO_ROOT / "scenarios" / "paper-test1.conf"
