"""Deterministic CSV and JSON output with embedded configuration and content hash.

Every file starts with the run's configuration; the data part is hashed the
way git hashes a blob, so identical results give identical hashes and a
loader can detect edits.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, config_json
from .errors import ConfigError

CSV_MAGIC = "# kickedgauss"


def content_hash(data: bytes) -> str:
    """SHA-1 of ``b"blob <len>\\0" + data``, as reported by ``git hash-object``."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _cell(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if np.isnan(v):
        return "nan"
    return repr(v)


def format_csv(columns: dict, units: dict | None = None) -> str:
    """Header ``name [unit],...`` followed by one row per sample."""
    units = units or {}
    names = list(columns)
    arrays = [np.asarray(columns[k]) for k in names]
    n = len(arrays[0])
    if any(len(a) != n for a in arrays):
        raise ValueError("columns differ in length")
    head = ",".join(f"{k} [{units[k]}]" if k in units else k for k in names)
    rows = (",".join(_cell(a[i]) for a in arrays) for i in range(n))
    return head + "\n" + "".join(r + "\n" for r in rows)


def write_csv(path, columns: dict, config: ExperimentConfig, units: dict | None = None, title: str = "") -> Path:
    body = format_csv(columns, units)
    head = f"{CSV_MAGIC} {title}".rstrip() + "\n"
    head += f"# config: {config_json(config)}\n"
    head += f"# sha1: {content_hash(body.encode())}\n"
    return atomic_write(path, head + body)


def write_json(path, data: dict, config: ExperimentConfig) -> Path:
    payload = json.dumps(_plain(data), sort_keys=True, indent=2)
    doc = {"config": config.to_dict(), "data": json.loads(payload), "sha1": content_hash(payload.encode())}
    return atomic_write(path, json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return None if not np.isfinite(v) else v
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def read_csv(path, verify: bool = True) -> tuple[ExperimentConfig, dict]:
    """Load a CSV written by :func:`write_csv`; returns the validated config and float columns."""
    lines = Path(path).read_text().splitlines(keepends=True)
    if not lines or not lines[0].startswith(CSV_MAGIC):
        raise ConfigError(f"{path} is not a kickedgauss CSV")
    cfg = ExperimentConfig.from_dict(json.loads(lines[1].split(":", 1)[1])).validate()
    digest = lines[2].split(":", 1)[1].strip()
    body = "".join(lines[3:])
    if verify and content_hash(body.encode()) != digest:
        raise ConfigError(f"{path}: content hash mismatch")
    names = [h.split(" [")[0] for h in lines[3].strip().split(",")]
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[4:] if ln.strip()])
    data = data.reshape(-1, len(names))
    return cfg, {k: data[:, i] for i, k in enumerate(names)}


def read_json(path, verify: bool = True) -> tuple[ExperimentConfig, dict]:
    doc = json.loads(Path(path).read_text())
    cfg = ExperimentConfig.from_dict(doc["config"]).validate()
    if verify:
        payload = json.dumps(doc["data"], sort_keys=True, indent=2)
        if content_hash(payload.encode()) != doc["sha1"]:
            raise ConfigError(f"{path}: content hash mismatch")
    return cfg, doc["data"]


def load_config(path) -> ExperimentConfig:
    """Re-validated configuration embedded in any output file."""
    path = Path(path)
    if path.suffix == ".json":
        return read_json(path, verify=False)[0]
    return read_csv(path, verify=False)[0]
