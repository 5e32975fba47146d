"""Deterministic parallel map with per-task checkpoints.

Tasks are submitted individually to a process pool, so idle workers pick up
the next pending task. Results are placed by task index, which makes the
output independent of completion order. Only the parent process writes
checkpoint files.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Callable, Optional, Sequence

__all__ = ["WORKERS_ENV", "default_workers", "CheckpointStore", "SweepError", "parallel_map", "stable_hash"]

WORKERS_ENV = "BALANCED_COUPLING_WORKERS"

log = logging.getLogger(__name__)


def default_workers() -> int:
    """Worker count from ``BALANCED_COUPLING_WORKERS``, else the CPU count."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


def stable_hash(obj) -> str:
    """Short sha256 of a JSON-serializable object with sorted keys."""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


class SweepError(RuntimeError):
    """Some tasks failed; ``completed`` lists the keys that finished."""

    def __init__(self, failures: dict, completed: list):
        self.failures = failures
        self.completed = completed
        first = next(iter(failures.items()))
        super().__init__(
            f"{len(failures)} task(s) failed, {len(completed)} completed; first failure {first[0]}: {first[1]}"
        )


class CheckpointStore:
    """One JSON file per finished task, written atomically."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def load(self, key: str):
        p = self._path(key)
        if not p.exists():
            return None
        try:
            return json.loads(p.read_text())
        except json.JSONDecodeError:
            log.warning("ignoring unreadable checkpoint %s", p)
            return None

    def save(self, key: str, payload) -> None:
        p = self._path(key)
        tmp = p.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True))
        os.replace(tmp, p)

    def write_manifest(self, completed: Sequence[str], failures: dict) -> None:
        payload = {"completed": sorted(completed), "failures": {k: failures[k] for k in sorted(failures)}}
        tmp = self.directory / "manifest.tmp"
        tmp.write_text(json.dumps(payload, indent=1, sort_keys=True))
        os.replace(tmp, self.directory / "manifest.json")


def parallel_map(
    fn: Callable,
    tasks: Sequence,
    keys: Sequence[str],
    workers: Optional[int] = None,
    store: Optional[CheckpointStore] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> list:
    """``[fn(t) for t in tasks]`` in task order, computed in parallel.

    ``fn`` must be picklable and return JSON-serializable data. Tasks whose
    key already has a checkpoint are loaded instead of recomputed.
    """
    if len(keys) != len(tasks) or len(set(keys)) != len(keys):
        raise ValueError("keys must be unique and match tasks one to one")
    workers = default_workers() if workers is None else int(workers)
    results: list = [None] * len(tasks)
    pending = []
    for i, k in enumerate(keys):
        cached = store.load(k) if store is not None else None
        if cached is not None:
            results[i] = cached
        else:
            pending.append(i)
    done = len(tasks) - len(pending)
    failures: dict = {}

    def finish(i, value):
        nonlocal done
        results[i] = value
        if store is not None:
            store.save(keys[i], value)
        done += 1
        if progress is not None:
            progress(done, len(tasks))

    if workers <= 1 or len(pending) <= 1:
        for i in pending:
            try:
                finish(i, fn(tasks[i]))
            except Exception as exc:  # collected and reported below
                failures[keys[i]] = f"{type(exc).__name__}: {exc}"
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(pending))) as pool:
            futs = {pool.submit(fn, tasks[i]): i for i in pending}
            for fut in as_completed(futs):
                i = futs[fut]
                try:
                    finish(i, fut.result())
                except Exception as exc:
                    failures[keys[i]] = f"{type(exc).__name__}: {exc}"
    completed = [k for k, r in zip(keys, results) if r is not None]
    if store is not None:
        store.write_manifest(completed, failures)
    if failures:
        raise SweepError(failures, completed)
    return results
