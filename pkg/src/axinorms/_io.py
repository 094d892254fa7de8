from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Tuple
import hashlib
import os
import pickle

import pandas as pd

from .analysis import SweepResult

__all__ = [
    "sha256_file",
    "atomic_write_text",
    "save_frame",
    "load_frame",
    "save_result",
    "load_result",
]


def sha256_file(path: Path, chunk: int = 1 << 20) -> Tuple[str, int]:
    """Return (sha256_hex, size_bytes) for file at path."""
    h = hashlib.sha256()
    size = 0
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(chunk), b""):
            h.update(block)
            size += len(block)
    return h.hexdigest(), size


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(text)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


def save_frame(base: Path, label: str, df: pd.DataFrame, *, write_checksums: bool) -> Dict[str, Any]:
    """Write a frame as parquet (pickle when no parquet engine is installed); return its manifest node."""
    try:
        p = base / f"{label}.parquet"
        df.to_parquet(p)
        kind = "parquet"
    except Exception:
        p = base / f"{label}.pkl"
        with open(p, "wb") as f:
            pickle.dump(df, f, protocol=pickle.HIGHEST_PROTOCOL)
        kind = "pickle"
    node: Dict[str, Any] = {"kind": kind, "file": p.name, "rows": int(len(df))}
    if write_checksums:
        node["sha256"], node["size"] = sha256_file(p)
    return node


def _verify(base: Path, entry: Dict[str, Any], strict_integrity: bool) -> None:
    path = base / entry["file"]
    sha, size = sha256_file(path)
    expected_sha = entry["sha256"]
    expected_sz = entry.get("size", size)
    if sha == expected_sha and size == expected_sz:
        return
    raise ValueError(
        "Sweep store integrity check failed\n"
        f"  file: {path}\n"
        f"  kind: {entry.get('kind', '?')}\n"
        f"  expected: sha256={expected_sha} size={expected_sz}\n"
        f"  got:      sha256={sha} size={size}\n"
        f"strict_integrity={strict_integrity}: refusing to load the stored sweep.\n"
        "Fix one of the following:\n"
        "  1) Delete the corrupted file or its key directory and rerun the sweep.\n"
        "  2) Rerun with strict_integrity=False to recompute and overwrite.\n"
        "  3) If the file was edited on purpose, update its checksum in:\n"
        f"       {base / 'manifest.json'}\n"
    )


def load_frame(
    base: Path, entry: Dict[str, Any], *, verify_checksums: bool = False, strict_integrity: bool = True
) -> pd.DataFrame:
    if verify_checksums and "sha256" in entry:
        _verify(base, entry, strict_integrity)
    path = base / entry["file"]
    if entry["kind"] == "parquet":
        return pd.read_parquet(path)
    with open(path, "rb") as f:
        return pickle.load(f)


def save_result(base: Path, result: Any, *, write_checksums: bool) -> Dict[str, Any]:
    """
    Persist a sweep-like result and return the manifest meta.
    - SweepResult -> frame as parquet/pickle, ensemble descriptor inline
    - DataFrame -> parquet/pickle
    """
    if isinstance(result, SweepResult):
        node = save_frame(base, "frame", result.frame, write_checksums=write_checksums)
        return {"container": "sweep", "items": [node], "ensemble": result.ensemble}
    if isinstance(result, pd.DataFrame):
        node = save_frame(base, "frame", result, write_checksums=write_checksums)
        return {"container": "frame", "items": [node]}
    raise TypeError(f"cannot store {type(result).__name__}; expected SweepResult or DataFrame")


def load_result(base: Path, meta: Dict[str, Any], *, verify_checksums: bool, strict_integrity: bool) -> Any:
    c = meta["container"]
    frame = load_frame(base, meta["items"][0], verify_checksums=verify_checksums, strict_integrity=strict_integrity)
    if c == "sweep":
        return SweepResult(frame, dict(meta.get("ensemble", {})))
    if c == "frame":
        return frame
    raise ValueError(f"unknown container: {c}")
