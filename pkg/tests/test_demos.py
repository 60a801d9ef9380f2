import runpy
from pathlib import Path

import pytest

DEMOS = Path(__file__).resolve().parent.parent / "demos"
# the protocol walkthrough runs for about half a minute and is left to manual runs
FAST = ["association_measures.py", "feature_pipeline.py", "boosting_with_l1.py", "linear_baseline.py"]


@pytest.mark.parametrize("name", FAST)
def test_demo_runs(name, capsys):
    runpy.run_path(str(DEMOS / name), run_name="__main__")
    assert capsys.readouterr().out
