"""
Pytest configuration with fixtures for the entire test suite
"""
from pathlib import Path
from typing import Any, Callable, Dict

import allure
import pytest
from dotenv import load_dotenv

from config.settings import settings
from src.core.logger import LabLogger
from src.fractional.kernel import clamp_counter
from test_data import load_reference_values

# Load environment variables
load_dotenv()

logger = LabLogger.get_logger(__name__)

ROOT = Path(__file__).parent
RECIPES = ROOT / "recipes"


@pytest.fixture(scope="session")
def reference_values() -> Dict[str, Any]:
    """Oracle constants shared by unit and acceptance tests"""
    return load_reference_values()


@pytest.fixture(scope="session")
def recipes_dir() -> Path:
    return RECIPES


@pytest.fixture
def output_dir(tmp_path) -> Path:
    """Fresh directory for CLI outputs"""
    path = tmp_path / "out"
    path.mkdir()
    return path


@pytest.fixture
def override_settings(monkeypatch) -> Callable[..., None]:
    """Temporarily change fields of the global settings"""
    def apply(**values):
        for key, value in values.items():
            if not hasattr(settings, key):
                raise AttributeError(f"LabSettings has no field '{key}'")
            monkeypatch.setattr(settings, key, value)
    return apply


@pytest.fixture
def write_recipe(tmp_path) -> Callable[[str, str], Path]:
    """Write recipe text to a file and return its path"""
    def write(text: str, name: str = "recipe.cfg") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return write


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Attach the failure and the run's clamp count to the allure report"""
    outcome = yield
    report = outcome.get_result()

    if report.when == "call" and report.failed:
        allure.attach(str(report.longrepr), name="failure", attachment_type=allure.attachment_type.TEXT)
        allure.attach(f"clamped kernel values: {clamp_counter.value}", name="clamps",
                      attachment_type=allure.attachment_type.TEXT)
        logger.error(f"Test failed: {item.name}")


@pytest.fixture(autouse=True)
def setup_teardown(request):
    """Autouse fixture for setup and teardown operations"""
    clamp_counter.reset()
    logger.debug(f"Starting test: {request.node.name}")

    yield

    logger.debug(f"Finished test: {request.node.name}")
