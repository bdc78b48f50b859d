import hashlib
import json
import logging
import os
import shutil
import time
from datetime import datetime, timezone
from typing import Callable, Dict, List, Optional, Union

import numpy as np
import pandas as pd
from jinja2 import Environment, FileSystemLoader
from tqdm import tqdm

from yamabelab._version import __version__

logger = logging.getLogger(__name__)

FOLDERS = ["tables", "profiles", "reports", "metrics", "pandarallel_cache"]
CSV_FLOAT_FORMAT = "%.12e"


def prepare_output_dir(output_dir: str, clean_up: bool = False):
    """
    Prepares the output directory by creating the standard subdirectories.

    Args:
        output_dir (str): The directory path where output will be stored.
        clean_up (bool): Remove the directory first if it exists.
    """
    if clean_up and os.path.exists(output_dir):
        shutil.rmtree(output_dir, ignore_errors=True)

    os.makedirs(output_dir, exist_ok=True)
    for folder in FOLDERS:
        os.makedirs(os.path.join(output_dir, folder), exist_ok=True)

    # pandarallel workers share data through this directory
    os.environ["MEMORY_FS_ROOT"] = os.path.join(output_dir, "pandarallel_cache")


def write_csv(df: pd.DataFrame, path: str) -> str:
    """Write ``df`` with a fixed float format so identical inputs give identical bytes."""
    df.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {path}")
    return path


def write_json(payload: dict, path: str) -> str:
    with open(path, "w", encoding="utf-8") as writer:
        json.dump(_to_jsonable(payload), writer, indent=4, sort_keys=True)
    return path


def write_metrics(output_dir: str, name: str, metrics: Dict[str, float]) -> str:
    """Store timing metrics as ``metrics/<name>.json``."""
    return write_json(metrics, os.path.join(output_dir, "metrics", f"{name}.json"))


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as reader:
        for chunk in iter(lambda: reader.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(output_dir: str, command: str, config: dict, constants: dict,
                   files: Dict[str, str], extra: Optional[dict] = None) -> str:
    """
    Write ``<command>_manifest.json`` next to the outputs it describes.

    Args:
        output_dir (str): Run output directory.
        command (str): CLI command name.
        config (dict): Fully resolved configuration.
        constants (dict): Derived constants (p, c_ns, kappa_ns, gamma_ns, ...).
        files (dict): Output path -> plain-language statement the file instantiates.
        extra (dict): Additional command-specific entries.

    Returns:
        str: Path of the manifest.
    """
    entries = []
    for path in sorted(files):
        entries.append({
            "path": os.path.relpath(path, output_dir),
            "sha256": sha256_file(path),
            "statement": files[path],
        })
    manifest = {
        "version": __version__,
        "command": command,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": config,
        "constants": constants,
        "files": entries,
    }
    if extra:
        manifest.update(extra)
    path = os.path.join(output_dir, f"{command}_manifest.json")
    write_json(manifest, path)
    logger.info(f"Manifest written to {path}")
    return path


def render_summary(output_dir: str, title: str, sections: List[dict]) -> str:
    """
    Render ``reports/summary.md`` from the packaged Jinja2 template.

    Args:
        output_dir (str): Run output directory.
        title (str): Report heading.
        sections (list): Dicts with ``heading``, ``rows`` (list of (name, value)) and optional ``note``.
    """
    path = os.path.dirname(os.path.abspath(__file__))
    env = Environment(loader=FileSystemLoader(os.path.join(path, "templates")), keep_trailing_newline=True)
    template = env.get_template("summary.md.j2")
    rendered = template.render(title=title, version=__version__, sections=sections)
    target = os.path.join(output_dir, "reports", "summary.md")
    with open(target, "w", encoding="utf-8") as writer:
        writer.write(rendered)
    return target


def run_sweep(df: pd.DataFrame, func: Callable, workers: int = 1, description: str = "sweep") -> Union[pd.Series, pd.DataFrame]:
    """
    Apply ``func`` row-wise, in parallel with pandarallel when ``workers > 1``.
    A DataFrame comes back when ``func`` returns a Series per row.

    Rows are independent and ``func`` must be a pure function of the row, so the result
    does not depend on the worker count.
    """
    if workers > 1:
        from pandarallel import pandarallel

        pandarallel.initialize(nb_workers=workers, progress_bar=False, verbose=0)
        return df.parallel_apply(func, axis=1)
    tqdm.pandas(desc=description)
    return df.progress_apply(func, axis=1)


class Timer:
    """Context manager collecting ``<name>_time_ms`` entries."""

    def __init__(self, metrics: Dict[str, float], name: str):
        self.metrics = metrics
        self.name = name

    def __enter__(self):
        self.start = time.time()
        return self

    def __exit__(self, *exc):
        self.metrics[f"{self.name}_time_ms"] = (time.time() - self.start) * 1000


def _to_jsonable(value):
    if isinstance(value, dict):
        return {str(k): _to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _to_jsonable(value.tolist())
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


