# -----------------------------------------------------------------------------
# src/axinorms/store.py
"""On-disk store for sweep results.

Layout: ``<cache_dir>/<qualname>/<key>/manifest.json`` next to the frame file
(Parquet, or pickle without a Parquet engine). Manifests carry sha256 and size
per file and are replaced atomically.
"""
from __future__ import annotations

from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, Optional, Tuple, Union
import json
import logging
import shutil

from ._io import atomic_write_text, load_result, save_result
from ._key import make_key
from ._lock import DirLock

__all__ = [
    "DEFAULT_CACHE_DIR",
    "persist_sweep",
    "read_manifest",
    "iter_leaf_entries",
    "count_key_dirs",
    "clear",
]

logger = logging.getLogger(__name__)

DEFAULT_CACHE_DIR = ".axinorms_store"


def persist_sweep(
    cache_dir: Union[str, Path] = DEFAULT_CACHE_DIR,
    *,
    version: Optional[str] = None,
    refresh: bool = False,
    lock_timeout: float = 10.0,
    lock_sleep: float = 0.02,
    write_checksums: bool = True,
    verify_checksums: bool = True,
    strict_integrity: bool = True,
) -> Callable:
    """Persist the SweepResult (or DataFrame) returned by the decorated function.

    Identical arguments load the stored result instead of recomputing. With
    ``strict_integrity`` a corrupted or unreadable entry raises; without it the
    entry is recomputed and overwritten.
    """
    cache_root = Path(cache_dir)

    def decorator(func: Callable) -> Callable:
        qual = getattr(func, "__qualname__", func.__name__)

        def _load(base: Path, manifest: Path) -> Tuple[bool, Any]:
            if refresh or not manifest.exists():
                return False, None
            try:
                meta = json.loads(manifest.read_text())
                result = load_result(base, meta, verify_checksums=verify_checksums, strict_integrity=strict_integrity)
            except Exception:
                if strict_integrity:
                    raise
                logger.warning("discarding unreadable store entry %s", base)
                return False, None
            logger.info("store hit %s/%s", qual, base.name)
            return True, result

        @wraps(func)
        def wrapper(*args, **kwargs):
            key = make_key(qual, args, kwargs, version)
            base = cache_root / qual / key
            manifest = base / "manifest.json"

            hit, result = _load(base, manifest)
            if hit:
                return result

            base.mkdir(parents=True, exist_ok=True)
            with DirLock(base, timeout=lock_timeout, sleep=lock_sleep):
                hit, result = _load(base, manifest)  # another writer may have finished
                if hit:
                    return result
                logger.info("store miss %s/%s: computing", qual, key)
                result = func(*args, **kwargs)
                meta = save_result(base, result, write_checksums=write_checksums)
                atomic_write_text(manifest, json.dumps(meta, indent=2, sort_keys=True))
                return result

        return wrapper

    return decorator


def read_manifest(cache_root: Union[str, Path]) -> Tuple[Path, Dict[str, Any]]:
    """First manifest under ``cache_root`` and its parsed content."""
    root = Path(cache_root)
    m = next(root.rglob("manifest.json"))
    return m, json.loads(m.read_text())


def iter_leaf_entries(meta: Dict[str, Any]) -> Iterator[Dict[str, Any]]:
    c = meta["container"]
    if c not in ("sweep", "frame"):
        raise ValueError(f"unknown container: {c}")
    yield from meta["items"]


def count_key_dirs(cache_root: Union[str, Path], func_qualname: str) -> int:
    root = Path(cache_root) / func_qualname
    return sum(1 for p in root.glob("*") if p.is_dir())


def clear(cache_dir: Union[str, Path], func_qualname: Optional[str] = None, key: Optional[str] = None) -> int:
    """
    Remove stored sweeps.

    - clear(cache_dir): the whole store
    - clear(cache_dir, func_qualname): every key of that function
    - clear(cache_dir, func_qualname, key): one key directory
    Returns 1 if something was removed, else 0.
    """
    root = Path(cache_dir)
    if key and not func_qualname:
        raise ValueError("clear() needs func_qualname when key is given")
    target = root
    if func_qualname:
        target = target / func_qualname
        if key:
            target = target / key
    if target.exists():
        shutil.rmtree(target)
        return 1
    return 0
