import functools
import time
import pathlib
import sys

import pytest

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fimod import fuzz, io  # noqa: E402

CORPUS = sorted((ROOT / "corpus").glob("*.fi"))
FUZZ_SEED = 42


def load(name):
    v, _ = io.load_module(ROOT / "corpus" / name)
    return v


SAMPLING_SECONDS = {}


@functools.lru_cache(maxsize=None)
def fuzz_cases(seed=FUZZ_SEED, count=100, field=None):
    """Sampled once per session; tests share the modules."""
    t0 = time.perf_counter()
    out = tuple(fuzz.sample_cases(seed, count, field=field))
    SAMPLING_SECONDS[(seed, count, field)] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="session")
def corpus_modules():
    return [(p.name, io.load_module(p)[0]) for p in CORPUS]


SUITE_LIMIT = 600


def pytest_configure(config):
    config.acceptance_log = {}
    config.suite_started = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = getattr(config, "acceptance_log", {})
    if not log:
        return
    elapsed = time.perf_counter() - config.suite_started
    terminalreporter.section("acceptance criteria")
    for n in sorted(log):
        ok, detail = log[n]
        if n == 13:
            within = elapsed < SUITE_LIMIT
            detail = f"{detail}; suite wall time {elapsed:.0f}s (limit {SUITE_LIMIT}s)"
            ok = ok and within
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
