"""Report storage: the lock file, atomic writes and default report paths."""
from __future__ import annotations

import json
import os
import time

from limitgroups.services.storage import (
    _acquire_lock,
    file_lock,
    resolve_report_path,
    write_text_atomic,
)
from limitgroups.utils.helpers import load_json_file


class TestFileLock:
    """Verify the file_lock context manager works correctly."""

    def test_file_lock_acquires_and_releases(self, tmp_path):
        path = str(tmp_path / "report.json")
        with file_lock(path, timeout=2) as acquired:
            assert acquired is True
            assert os.path.exists(path + ".lock")
        assert not os.path.exists(path + ".lock")

    def test_file_lock_timeout(self, tmp_path):
        path = str(tmp_path / "report.json")
        assert _acquire_lock(path + ".lock", timeout=1, retry_sleep=0.01)
        with file_lock(path, timeout=0) as acquired:
            assert acquired is False
        # a lock we did not take is left alone
        assert os.path.exists(path + ".lock")

    def test_stale_lock_is_cleared(self, tmp_path):
        path = str(tmp_path / "report.json")
        lock = path + ".lock"
        with open(lock, "w", encoding="utf-8") as f:
            f.write("12345")
        old = time.time() - 60
        os.utime(lock, (old, old))
        with file_lock(path, timeout=1, retry_sleep=0.01) as acquired:
            assert acquired is True
        assert not os.path.exists(lock)


class TestAtomicWrite:
    def test_write_and_read_back(self, tmp_path):
        path = str(tmp_path / "nested" / "out.json")
        assert write_text_atomic(path, json.dumps({"rows": [1, 2]})) == path
        assert load_json_file(path) == {"rows": [1, 2]}
        assert not os.path.exists(path + ".tmp")
        assert not os.path.exists(path + ".lock")

    def test_overwrite(self, tmp_path):
        path = str(tmp_path / "out.json")
        write_text_atomic(path, "first")
        write_text_atomic(path, "second")
        with open(path, encoding="utf-8") as f:
            assert f.read() == "second"


class TestReportPaths:
    def test_explicit_path_kept(self, tmp_path):
        path = str(tmp_path / "mine.json")
        assert resolve_report_path(path, "surface onset") == path

    def test_default_path_under_reports_dir(self, reports_dir):
        assert not reports_dir.exists()
        path = resolve_report_path("", "surface onset")
        assert path == os.path.join(str(reports_dir), "surface_onset.json")
        assert reports_dir.is_dir()

    def test_hyphenated_action(self, reports_dir):
        path = resolve_report_path(None, "surface twist-audit")
        assert os.path.basename(path) == "surface_twist_audit.json"
