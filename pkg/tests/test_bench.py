"""The backend benchmark must run end to end on a small workload."""

import subprocess
import sys


def test_bench_smoke():
    got = subprocess.run(
        [sys.executable, "-m", "forkjoinq.bench", "--jobs", "30000", "--fanout", "4"],
        capture_output=True,
        text=True,
        timeout=600,
    )
    assert got.returncode == 0, got.stderr
    out = got.stdout
    assert "non-purging" in out and "purging" in out and "split-merge" in out
    if "numba" in out and "numpy" in out and "speedup" in out:
        assert "|mean drift|" in out
