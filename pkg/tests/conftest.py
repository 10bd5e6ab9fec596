"""
pytest configuration and fixtures for cddp-toolkit
"""

import shutil
import sys
import tempfile
from pathlib import Path

import pytest

# Add src to path for testing
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

import factories  # noqa: E402
from core.utils.config import reset_config_manager  # noqa: E402


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests"""
    temp_path = tempfile.mkdtemp()
    yield Path(temp_path)
    shutil.rmtree(temp_path)


@pytest.fixture(autouse=True)
def disable_color_output(monkeypatch):
    """Disable color output for all tests"""
    monkeypatch.setenv("NO_COLOR", "1")


@pytest.fixture(autouse=True)
def default_config(monkeypatch, tmp_path):
    """Packaged defaults only; no user config file is picked up"""
    monkeypatch.delenv("CDDP_CONFIG", raising=False)
    monkeypatch.delenv("CDDP_SEED", raising=False)
    monkeypatch.chdir(tmp_path)
    reset_config_manager()
    yield
    reset_config_manager()


@pytest.fixture
def pair_instance():
    return factories.single_pair_instance()


@pytest.fixture
def tiny_instance():
    return factories.tiny_instance()


@pytest.fixture
def roomy_instance():
    return factories.roomy_instance()

