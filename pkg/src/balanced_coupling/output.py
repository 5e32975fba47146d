"""CSV tables and JSON run manifests.

A CSV starts with one ``#`` line holding the resolved parameters, then the
column names, then the rows. Floats are written with ``repr`` (shortest
round-trip form), so equal inputs give byte-identical files. The manifest
is written after every output file exists and is the completion marker of
a run.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

__all__ = ["format_value", "format_params", "write_csv", "file_hashes", "RunManifest", "write_manifest"]


def format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (tuple, list)):
        return ",".join(format_value(x) for x in v)
    return str(v)


def format_params(params: Mapping) -> str:
    return " ".join(f"{k}={format_value(params[k])}" for k in params)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_csv(path, columns: Mapping, params: Mapping) -> Path:
    """Write equal-length ``columns`` (name -> 1-D array) under a parameter header line."""
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    lengths = {a.shape[0] for a in arrays}
    if len(lengths) > 1:
        raise ValueError(f"columns have different lengths: {dict(zip(names, (a.shape[0] for a in arrays)))}")
    lines = ["# " + format_params(params), ",".join(names)]
    for row in zip(*arrays):
        lines.append(",".join(format_value(v.item() if hasattr(v, "item") else v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def file_hashes(path) -> dict:
    """sha256 of the file and its git blob id."""
    data = Path(path).read_bytes()
    blob = hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()
    return {"sha256": hashlib.sha256(data).hexdigest(), "git_blob_sha1": blob}


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    outputs: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    started: float = field(default_factory=time.perf_counter)

    def to_dict(self, out_dir: Path) -> dict:
        files = []
        for p in self.outputs:
            p = Path(p)
            if not p.exists():
                raise FileNotFoundError(f"listed output {str(p)!r} does not exist")
            files.append({"file": p.name, **file_hashes(p)})
        return {
            "subcommand": self.subcommand,
            "parameters": {k: _jsonable(v) for k, v in self.parameters.items()},
            "outputs": files,
            "metrics": {k: _jsonable(v) for k, v in self.metrics.items()},
            "duration_s": time.perf_counter() - self.started,
        }


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, float) and not np.isfinite(v):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def write_manifest(manifest: RunManifest, out_dir) -> Path:
    out_dir = Path(out_dir)
    path = out_dir / f"{manifest.subcommand}_manifest.json"
    _atomic_write(path, json.dumps(manifest.to_dict(out_dir), indent=1, sort_keys=True) + "\n")
    return path
