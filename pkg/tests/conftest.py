import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def fixture_run(tmp_path_factory):
    """One full pipeline run over the bundled 40-headline fixture corpus."""
    from headline_classifier.pipeline import RunConfig, run_pipeline

    out_dir = tmp_path_factory.mktemp("fixture_run")
    config = RunConfig(
        million=str(DATA_DIR / "million.csv"),
        fakereal=str(DATA_DIR / "fakereal.csv"),
        gettingreal=str(DATA_DIR / "gettingreal.csv"),
        out_dir=str(out_dir),
    )
    report = run_pipeline(config)
    return config, report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    try:
        from test_acceptance import CRITERIA
    except Exception:
        return
    seen = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            name = report.nodeid.rsplit("::", 1)[-1]
            for key in CRITERIA:
                if name.startswith(key):
                    seen[key] = outcome
    if not seen:
        return
    terminalreporter.section("acceptance criteria")
    for key, description in CRITERIA.items():
        if key in seen:
            status = "PASS" if seen[key] == "passed" else "FAIL"
            terminalreporter.write_line(f"{status}  {description}")
