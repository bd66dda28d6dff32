"""
Fixtures for the desk-scale experiments
"""
from typing import Callable, Tuple

import pytest

from config.recipes import load_recipe
from src.dynamics.front import FrontRecorder, FrontTrace
from src.dynamics.solver import RunResult, run


@pytest.fixture
def run_front_recipe(recipes_dir) -> Callable[[str], Tuple[object, RunResult, FrontTrace]]:
    """Run a shipped recipe with its front recorder attached"""
    def execute(name: str, level: float = None):
        recipe = load_recipe(str(recipes_dir / name))
        recorder = FrontRecorder(recipe.level if level is None else level, recipe.side, recipe.origin)
        result = run(recipe.solver_config(), recipe.datum(), [recorder], keep="ends")
        return recipe, result, recorder.trace()
    return execute
