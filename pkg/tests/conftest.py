"""Shared fixtures: session-scoped zero tables (disk-cached under
tests/.cache/ because the large builds cost minutes) and the acceptance
summary hook that prints one line per acceptance criterion at the end of
the run."""

import json
import pathlib
import time
from typing import Dict, Tuple

import pytest

from zetaharmonic.zeros.pipeline import build_zero_table
from zetaharmonic.zeros.table import ZeroTable, load_zero_table, save_zero_table

CACHE = pathlib.Path(__file__).parent / ".cache"

# criterion number -> (label, passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS: Dict[int, Tuple[str, bool, str]] = {}


def cached_table(count: int) -> ZeroTable:
    """Load the count-zero table from the cache, building and saving it on
    first use.  The sidecar meta file records the measured build time so
    later runs can still assert the generation budget honestly."""
    CACHE.mkdir(exist_ok=True)
    path = CACHE / f"zeros_{count}.zt"
    if path.exists():
        return load_zero_table(path)
    t0 = time.perf_counter()
    table = build_zero_table(count=count)
    dt = time.perf_counter() - t0
    save_zero_table(path, table)
    meta = {"zeros": len(table), "build_seconds": round(dt, 1),
            "certified_height": str(table.certificate.height.midpoint)[:24]}
    (CACHE / f"build_meta_{count}.json").write_text(json.dumps(meta, indent=1))
    return table


def build_seconds(count: int) -> float:
    """Measured wall-clock seconds of the cached table's build."""
    names = [f"build_meta_{count}.json"]
    if count == 100000:
        names.append("build_meta.json")  # original sidecar name
    for name in names:
        p = CACHE / name
        if p.exists():
            return float(json.loads(p.read_text())["build_seconds"])
    raise FileNotFoundError(f"no build meta for count={count}")


@pytest.fixture(scope="session")
def table_100k() -> ZeroTable:
    return cached_table(100000)


@pytest.fixture(scope="session")
def table_10k() -> ZeroTable:
    return cached_table(10000)


@pytest.fixture(scope="session")
def table_200() -> ZeroTable:
    # small enough to build fresh every session: exercises the pipeline
    return build_zero_table(count=200)


@pytest.fixture()
def acceptance():
    def record(number: int, label: str, passed: bool, detail: str = ""):
        ACCEPTANCE_RESULTS[number] = (label, passed, detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        label, passed, detail = ACCEPTANCE_RESULTS[num]
        status = "PASS" if passed else "FAIL"
        line = f"criterion {num}: {status} — {label}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
