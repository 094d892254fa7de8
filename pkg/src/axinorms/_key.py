from __future__ import annotations

from dataclasses import asdict, is_dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple
import hashlib
import json

__all__ = ["canonical", "make_key"]


def canonical(value: Any) -> Any:
    """JSON-ready form of a sweep argument; equal arguments map to equal forms."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return {"float": repr(value)}
    if isinstance(value, Fraction):
        return {"fraction": str(value)}
    if is_dataclass(value) and not isinstance(value, type):
        return {"dataclass": type(value).__qualname__, "fields": canonical(asdict(value))}
    if isinstance(value, dict):
        return {"dict": sorted(([canonical(k), canonical(v)] for k, v in value.items()), key=json.dumps)}
    if isinstance(value, (list, tuple, range)):
        return [canonical(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return {"set": sorted((canonical(v) for v in value), key=json.dumps)}
    return {"repr": repr(value)}


def make_key(
    func_name: str,
    args: Tuple[Any, ...],
    kwargs: Dict[str, Any],
    version: Optional[str] = None,
) -> str:
    """
    Stable store key: sha256(qualname | optional version | canonical payload).

    Keyword arguments are sorted by name, so call order does not matter.
    Returns a 64-char hex string.
    """
    payload = {"args": canonical(args), "kwargs": canonical(dict(sorted(kwargs.items())))}
    m = hashlib.sha256()
    m.update(func_name.encode("utf-8"))
    if version:
        m.update(b"|ver:" + version.encode("utf-8"))
    m.update(json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8"))
    return m.hexdigest()
