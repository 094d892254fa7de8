# tests/test_store.py
import json
import os
import threading
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import pandas as pd
import pytest

from axinorms._key import canonical, make_key
from axinorms._lock import DirLock
from axinorms.analysis import SWEEP_COLUMNS, EnsembleConfig, SweepResult
from axinorms.cli import sweep_table
from axinorms.store import clear, count_key_dirs, iter_leaf_entries, persist_sweep, read_manifest

STORE = ".axinorms_store"


def _result(m: int = 0) -> SweepResult:
    frame = pd.DataFrame(
        [{"m": m, "k": 0, "eps": 0.1, "ratio_min": 1.0, "ratio_max": 1.0, "skipped": 0, "quantity": "seminorm"}],
        columns=SWEEP_COLUMNS,
    )
    return SweepResult(frame, {str(m): {"draws": 1}})


def _corrupt(path: Path) -> None:
    with open(path, "r+b") as f:
        f.seek(0)
        f.write(b"\x00\x00\x00CORRUPTED")


def test_hot_hit_skips_compute(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    calls = []

    @persist_sweep(STORE)
    def sweep(m):
        calls.append(m)
        return _result(m)

    first = sweep(2)
    second = sweep(2)
    assert calls == [2]
    pd.testing.assert_frame_equal(first.frame, second.frame)
    assert second.ensemble == {"2": {"draws": 1}}
    sweep(3)
    assert calls == [2, 3]
    assert count_key_dirs(STORE, sweep.__qualname__) == 2


def test_real_sweep_round_trips(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run = persist_sweep(STORE)(sweep_table)
    config = EnsembleConfig(draws=4, max_terms=2)
    cold = run((0,), (0, 1), (Fraction(1, 10),), config)
    hot = run((0,), (0, 1), (Fraction(1, 10),), config)
    pd.testing.assert_frame_equal(cold.frame, hot.frame)
    assert hot.ensemble == json.loads(json.dumps(cold.ensemble))
    _, meta = read_manifest(STORE)
    assert meta["container"] == "sweep"


def test_refresh_recomputes(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    calls = []

    def sweep():
        calls.append(1)
        return _result()

    persist_sweep(STORE)(sweep)()
    persist_sweep(STORE, refresh=True)(sweep)()
    assert len(calls) == 2


def test_missing_manifest_recomputes(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    calls = []

    @persist_sweep(STORE)
    def sweep():
        calls.append(1)
        return _result()

    sweep()
    manifest, _ = read_manifest(STORE)
    manifest.unlink()
    sweep()
    assert len(calls) == 2
    assert manifest.exists()


def test_plain_frames_are_stored(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    @persist_sweep(STORE)
    def table():
        return pd.DataFrame({"x": [1, 2]})

    table()
    out = table()
    assert list(out["x"]) == [1, 2]
    _, meta = read_manifest(STORE)
    assert meta["container"] == "frame"


def test_other_results_are_rejected(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    @persist_sweep(STORE)
    def bad():
        return {"x": 1}

    with pytest.raises(TypeError):
        bad()


def test_pickle_fallback_without_parquet(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    def no_parquet(self, *args, **kwargs):
        raise ImportError("no parquet engine")

    monkeypatch.setattr(pd.DataFrame, "to_parquet", no_parquet)

    @persist_sweep(STORE)
    def sweep():
        return _result(1)

    sweep()
    _, meta = read_manifest(STORE)
    entry = next(iter_leaf_entries(meta))
    assert entry["kind"] == "pickle" and entry["file"].endswith(".pkl")
    assert list(sweep().frame["m"]) == [1]


def test_concurrent_callers_compute_once(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    calls = []
    barrier = threading.Barrier(2)

    @persist_sweep(STORE, lock_timeout=5.0)
    def sweep():
        calls.append(1)
        time.sleep(0.3)
        return _result()

    results = []

    def worker():
        barrier.wait()
        results.append(sweep())

    threads = [threading.Thread(target=worker) for _ in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    assert len(calls) == 1
    assert len(results) == 2
    pd.testing.assert_frame_equal(results[0].frame, results[1].frame)


def test_strict_integrity_raises_with_clear_message(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    @persist_sweep(STORE)
    def sweep():
        return _result()

    sweep()
    manifest, meta = read_manifest(STORE)
    data_file = manifest.parent / next(iter_leaf_entries(meta))["file"]
    _corrupt(data_file)

    with pytest.raises(ValueError) as ei:
        sweep()
    msg = str(ei.value)
    assert "Sweep store integrity check failed" in msg
    assert str(data_file) in msg
    assert "strict_integrity=True" in msg
    assert "Delete the corrupted file" in msg
    assert str(manifest) in msg


def test_non_strict_integrity_heals(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    calls = []

    @persist_sweep(STORE, strict_integrity=False)
    def sweep():
        calls.append(1)
        return _result(4)

    sweep()
    manifest, meta = read_manifest(STORE)
    _corrupt(manifest.parent / next(iter_leaf_entries(meta))["file"])
    assert list(sweep().frame["m"]) == [4]
    assert len(calls) == 2
    assert list(sweep().frame["m"]) == [4]
    assert len(calls) == 2


def test_verify_disabled_ignores_checksum_mismatch(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    @persist_sweep(STORE, verify_checksums=False)
    def sweep():
        return _result(5)

    sweep()
    manifest, meta = read_manifest(STORE)
    meta["items"][0]["sha256"] = "0" * 64
    manifest.write_text(json.dumps(meta, indent=2))
    assert list(sweep().frame["m"]) == [5]


def test_checksums_disabled_writes_no_hashes(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    @persist_sweep(STORE, write_checksums=False)
    def sweep():
        return _result()

    sweep()
    _, meta = read_manifest(STORE)
    entry = next(iter_leaf_entries(meta))
    assert "sha256" not in entry and "size" not in entry
    assert entry["rows"] == 1


def test_refresh_bypasses_a_corrupt_entry(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    def sweep():
        return _result(6)

    persist_sweep(STORE)(sweep)()
    manifest, meta = read_manifest(STORE)
    _corrupt(manifest.parent / next(iter_leaf_entries(meta))["file"])

    out = persist_sweep(STORE, refresh=True)(sweep)()
    assert list(out.frame["m"]) == [6]
    assert list(persist_sweep(STORE)(sweep)().frame["m"]) == [6]


def test_keys():
    base = make_key("f", (1, Fraction(1, 10)), {"a": 1, "b": 2})
    assert len(base) == 64
    assert base == make_key("f", (1, Fraction(1, 10)), {"b": 2, "a": 1})
    assert base != make_key("f", (1, Fraction(1, 10)), {"a": 1, "b": 2}, version="v2")
    assert base != make_key("g", (1, Fraction(1, 10)), {"a": 1, "b": 2})
    assert base != make_key("f", (1, 0.1), {"a": 1, "b": 2})


def test_canonical_forms():
    @dataclass(frozen=True)
    class Point:
        x: int
        y: Fraction

    assert canonical(Fraction(2, 4)) == {"fraction": "1/2"}
    assert canonical(Point(1, Fraction(1, 3))) == {
        "dataclass": "test_canonical_forms.<locals>.Point",
        "fields": {"dict": [["x", 1], ["y", {"fraction": "1/3"}]]},
    }
    assert canonical({3, 1, 2}) == canonical({2, 3, 1})
    assert canonical(range(3)) == [0, 1, 2]
    assert canonical(EnsembleConfig(seed=1)) != canonical(EnsembleConfig(seed=2))


def test_version_segregates_entries(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    def sweep():
        return _result()

    persist_sweep(STORE, version="v1")(sweep)()
    persist_sweep(STORE, version="v2")(sweep)()
    assert count_key_dirs(STORE, sweep.__qualname__) == 2


def test_clear(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    @persist_sweep(STORE)
    def sweep(m):
        return _result(m)

    sweep(1)
    sweep(2)
    qual = sweep.__qualname__
    key_dir = next(Path(STORE).rglob("manifest.json")).parent
    assert clear(STORE, qual, key_dir.name) == 1
    assert count_key_dirs(STORE, qual) == 1
    assert clear(STORE, qual, key_dir.name) == 0
    assert clear(STORE, qual) == 1
    assert not (Path(STORE) / qual).exists()
    sweep(1)
    assert clear(STORE) == 1
    assert not Path(STORE).exists()
    with pytest.raises(ValueError):
        clear(STORE, key="abc")


def test_lock_breaks_dead_owner(tmp_path):
    base = tmp_path / "key"
    base.mkdir()
    lock = tmp_path / "key.lock"
    lock.write_text("999999999")
    with DirLock(base, timeout=1.0) as held:
        assert lock.read_text() == held.owner
        assert held.owner.split()[0] == str(os.getpid())
    assert not lock.exists()
    assert list(tmp_path.iterdir()) == [base]


def test_lock_times_out_on_live_owner(tmp_path):
    base = tmp_path / "key"
    base.mkdir()
    (tmp_path / "key.lock").write_text(str(os.getpid()))
    with pytest.raises(TimeoutError) as ei:
        with DirLock(base, timeout=0.1, sleep=0.01):
            pass
    assert "lock timeout" in str(ei.value)


def test_lock_breaks_old_lock_files(tmp_path):
    base = tmp_path / "key"
    base.mkdir()
    (tmp_path / "key.lock").write_text(str(os.getpid()))
    time.sleep(0.05)
    with DirLock(base, timeout=0.5, stale_after=0.01) as lock:
        assert lock.fd is not None


def test_breaking_a_stale_lock_keeps_a_fresh_one(tmp_path, monkeypatch):
    # another waiter breaks the dead lock and takes a fresh one between our check and our break
    base = tmp_path / "key"
    base.mkdir()
    lock = tmp_path / "key.lock"
    lock.write_text("999999999")
    fresh = f"{os.getppid()} other"
    checks = []

    def owner_alive(owner):
        checks.append(owner)
        if len(checks) == 1:
            lock.unlink()
            lock.write_text(fresh)
            return False
        return True

    monkeypatch.setattr("axinorms._lock._owner_alive", owner_alive)
    with pytest.raises(TimeoutError):
        with DirLock(base, timeout=0.1, sleep=0.01):
            pass
    assert lock.read_text() == fresh
    assert sorted(p.name for p in tmp_path.iterdir()) == ["key", "key.lock"]


def test_exit_leaves_a_lock_it_does_not_own(tmp_path):
    base = tmp_path / "key"
    base.mkdir()
    lock = tmp_path / "key.lock"
    with DirLock(base, timeout=1.0):
        lock.unlink()
        lock.write_text("1 other")
    assert lock.read_text() == "1 other"
