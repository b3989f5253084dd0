import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize("script,args,outputs", [
    ("run_convergence.py", [], ["convergence.csv", "convergence.svg"]),
    ("run_power_sweep.py", ["--powers", "10", "23", "--trials", "2"],
     ["power_sweep.csv", "power_sweep.svg"]),
    ("run_user_sweep.py", ["--users", "4", "24", "--trials", "1"],
     ["user_sweep.csv", "user_sweep.svg"]),
    ("run_timing.py", ["--n-list", "4", "10", "--trials", "1"], ["timing.csv", "timing.svg"]),
])
def test_script_runs(tmp_path, script, args, outputs):
    subprocess.run([sys.executable, str(SCRIPTS / script), "--outdir", str(tmp_path), *args],
                   check=True, capture_output=True, text=True)
    for name in outputs:
        assert (tmp_path / name).stat().st_size > 0
