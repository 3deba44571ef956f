"""Desk-scale end-to-end acceptance run (several minutes on CPU)."""
import importlib.util
from pathlib import Path

import pytest

SCRIPT = Path(__file__).resolve().parents[2] / 'scripts' / 'analysis' / 'run_desk_acceptance.py'


def _load_script():
    spec = importlib.util.spec_from_file_location('run_desk_acceptance', SCRIPT)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.mark.slow
def test_desk_scale_acceptance(tmp_path):
    summary = _load_script().run(tmp_path, seed=0)
    failed = [name for name, ok in summary['checks'].items() if not ok]
    assert not failed, f"failed checks {failed}: {summary}"
