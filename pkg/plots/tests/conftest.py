import subprocess
import sys
from pathlib import Path

import pytest

PLOTS_DIR = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PLOTS_DIR))

SCRIPT = PLOTS_DIR / "plot_errors.py"


@pytest.fixture(scope="session")
def run_plot_script():
    def run(args):
        return subprocess.run(
            [sys.executable, str(SCRIPT), *args], capture_output=True, text=True
        )

    return run


@pytest.fixture(scope="session")
def scenario_csvs(tmp_path_factory):
    """fig1/fig2 CSVs produced through the simulator CLI."""
    out_dir = tmp_path_factory.mktemp("csv")
    paths = {}
    for name, command in (("fig1", "stabilize"), ("fig2", "track")):
        config = subprocess.run(
            [
                sys.executable,
                "-c",
                f"from ambientctl.cli import builtin_config_path; print(builtin_config_path('{name}'))",
            ],
            capture_output=True,
            text=True,
            check=True,
        ).stdout.strip()
        csv_path = out_dir / f"{name}.csv"
        subprocess.run(
            [
                sys.executable,
                "-m",
                "ambientctl",
                command,
                "--config",
                config,
                "--output",
                str(csv_path),
            ],
            capture_output=True,
            text=True,
            check=True,
        )
        paths[name] = csv_path
    return paths
