from __future__ import annotations

import logging
import os
import time
from contextlib import contextmanager
from typing import Iterator, Optional

from limitgroups.config.settings import AppConfig, ensure_reports_dir

logger = logging.getLogger("LIMITGROUPS")


def _clear_stale_lock(lock_path: str, timeout: int) -> None:
    """Remove a lock left behind by a crashed writer (older than ``5 * timeout`` seconds)."""
    try:
        age = time.time() - os.path.getmtime(lock_path)
    except OSError:
        return
    if age > max(timeout * 5, 5):
        logger.warning("Removing stale lock %s (%.0fs old)", lock_path, age)
        try:
            os.remove(lock_path)
        except OSError:
            pass


def _acquire_lock(lock_path: str, timeout: int, retry_sleep: float) -> bool:
    deadline = time.monotonic() + timeout
    while True:
        try:
            fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            _clear_stale_lock(lock_path, timeout)
            if time.monotonic() >= deadline:
                return False
            time.sleep(retry_sleep)
            continue
        with os.fdopen(fd, "w", encoding="utf-8") as owner:
            owner.write(str(os.getpid()))
        return True


def _release_lock(lock_path: str) -> None:
    try:
        os.remove(lock_path)
    except OSError:
        pass


@contextmanager
def file_lock(
    path: str,
    timeout: int = AppConfig.SAVE_LOCK_TIMEOUT,
    retry_sleep: float = AppConfig.SAVE_LOCK_RETRY_SLEEP,
) -> Iterator[bool]:
    """Yield ``True`` when ``path + ".lock"`` was acquired; release it on exit."""
    lock_path = path + ".lock"
    acquired = _acquire_lock(lock_path, timeout, retry_sleep)
    if not acquired:
        logger.error("Lock timeout for %s after %ss", path, timeout)
    try:
        yield acquired
    finally:
        if acquired:
            _release_lock(lock_path)


def resolve_report_path(path: Optional[str], command: str) -> str:
    """Explicit path, or ``REPORTS_DIR/<group>_<action>.json`` when ``path`` is empty."""
    if path:
        return path
    ensure_reports_dir()
    return os.path.join(AppConfig.REPORTS_DIR, command.replace(" ", "_").replace("-", "_") + ".json")


def write_text_atomic(path: str, text: str) -> str:
    """Write ``text`` under the lock via a temporary file and ``os.replace``."""
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    tmp = path + ".tmp"
    with file_lock(path) as acquired:
        if not acquired:
            raise OSError(f"could not lock {path}")
        last_error: Optional[Exception] = None
        for attempt in range(1, 4):
            try:
                with open(tmp, "w", encoding="utf-8", newline="\n") as f:
                    f.write(text)
                os.replace(tmp, path)
                return path
            except OSError as exc:
                last_error = exc
                logger.warning("Write attempt %s failed for %s", attempt, path, exc_info=True)
                time.sleep(AppConfig.SAVE_LOCK_RETRY_SLEEP)
        raise OSError(f"write failed after retries for {path}: {last_error}")
