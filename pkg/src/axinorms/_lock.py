from __future__ import annotations

from pathlib import Path
from typing import Optional
from uuid import uuid4
import logging
import os
import time

__all__ = ["DirLock"]

logger = logging.getLogger(__name__)


def _owner_alive(owner: str) -> bool:
    try:
        pid = int((owner.split() or ["0"])[0])
    except ValueError:
        return True  # unreadable: assume a live writer
    if pid <= 0:
        return True
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True


class DirLock:
    """Per-key lock: an exclusively created ``<key>.lock`` file holding ``"<pid> <token>"``.

    A lock whose owner process no longer exists, or which is older than
    ``stale_after`` seconds, is broken. Breaking renames the file aside first
    and puts it back if it turned out to be a fresh lock taken in between.
    """

    def __init__(
        self, base: Path, timeout: float = 10.0, sleep: float = 0.02, stale_after: Optional[float] = None
    ):
        self.lock = base.with_suffix(base.suffix + ".lock")
        self.timeout, self.sleep, self.stale_after = timeout, sleep, stale_after
        self.fd: Optional[int] = None
        self.owner = f"{os.getpid()} {uuid4().hex}"

    def _stale_owner(self) -> Optional[str]:
        """Contents of the current lock file if it is stale, else None."""
        try:
            owner = self.lock.read_text()
            age = time.time() - self.lock.stat().st_mtime
        except FileNotFoundError:
            return None
        except OSError:
            return None
        if self.stale_after is not None and age > self.stale_after:
            return owner
        return None if _owner_alive(owner) else owner

    def _break(self, seen: str) -> None:
        aside = self.lock.with_name(f"{self.lock.name}.stale.{uuid4().hex}")
        try:
            os.rename(self.lock, aside)
        except FileNotFoundError:
            return
        try:
            moved = aside.read_text()
        except OSError:
            moved = seen
        if moved != seen:
            # someone else broke it and took a fresh lock before our rename
            try:
                os.link(aside, self.lock)
            except OSError:
                logger.warning("could not restore lock %s taken by %s", self.lock, moved.split()[:1])
        else:
            logger.warning("breaking stale lock %s", self.lock)
        try:
            os.unlink(aside)
        except FileNotFoundError:
            pass

    def __enter__(self) -> "DirLock":
        start = time.monotonic()
        waited = False
        while True:
            try:
                self.fd = os.open(self.lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                os.write(self.fd, self.owner.encode())
                if waited:
                    logger.debug("acquired %s after %.3fs", self.lock, time.monotonic() - start)
                return self
            except FileExistsError:
                seen = self._stale_owner()
                if seen is not None:
                    self._break(seen)
                    continue
                if time.monotonic() - start > self.timeout:
                    raise TimeoutError(
                        f"lock timeout after {self.timeout}s: {self.lock}\n"
                        "Another sweep is writing this key. Wait for it, or delete the lock file "
                        "if no such process is running."
                    ) from None
                waited = True
                time.sleep(self.sleep)

    def __exit__(self, *exc) -> None:
        try:
            if self.fd is not None:
                os.close(self.fd)
            try:
                if self.lock.read_text() == self.owner:
                    os.unlink(self.lock)
            except FileNotFoundError:
                pass
        finally:
            self.fd = None
