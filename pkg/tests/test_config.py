import os

import pytest

from weylmax.config import RunConfig, load_config
from weylmax.parallel import WorkerPool


def test_defaults():
    cfg = RunConfig()
    assert cfg.threads == (os.cpu_count() or 1)
    assert cfg.seed == 0
    assert cfg.budget_seconds == 1800.0
    assert cfg.output_path == ""
    assert cfg.format == "csv"


def test_validation():
    with pytest.raises(ValueError):
        RunConfig(threads=0)
    with pytest.raises(ValueError):
        RunConfig(seed=-1)
    with pytest.raises(ValueError):
        RunConfig(seed=1 << 64)
    with pytest.raises(ValueError):
        RunConfig(budget_seconds=0.0)
    with pytest.raises(ValueError):
        RunConfig(format="xml")


def test_load_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("")
    assert load_config(str(path)) == RunConfig()


def test_load_overrides_and_comments(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\n\nthreads=4\nseed=42\nformat = json\n")
    cfg = load_config(str(path))
    assert cfg.threads == 4
    assert cfg.seed == 42
    assert cfg.format == "json"
    assert cfg.budget_seconds == 1800.0


def test_load_unknown_key_names_line(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("threds=4\n")
    with pytest.raises(ValueError, match="line 1"):
        load_config(str(path))


def test_load_bad_value_names_line(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("seed=0\nthreads=many\n")
    with pytest.raises(ValueError, match="line 2"):
        load_config(str(path))


def test_load_missing_equals(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("threads\n")
    with pytest.raises(ValueError, match="line 1"):
        load_config(str(path))


def test_load_invalid_combination_reports_path(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("threads=0\n")
    with pytest.raises(ValueError, match="bad.cfg"):
        load_config(str(path))


def test_pool_serial_and_threaded_agree():
    items = list(range(23))
    with WorkerPool(1) as serial, WorkerPool(4) as pooled:
        fn = lambda v: v * v  # noqa: E731
        assert serial.pmap(fn, items) == pooled.pmap(fn, items) == [v * v for v in items]


def test_pool_preserves_order_under_skew():
    import time

    def slow_first(v):
        if v == 0:
            time.sleep(0.05)
        return v

    with WorkerPool(4) as pool:
        assert pool.pmap(slow_first, list(range(8))) == list(range(8))


def test_pool_validation():
    with pytest.raises(ValueError):
        WorkerPool(0)
