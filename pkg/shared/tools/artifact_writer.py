"""Artifact Writer Tool"""

import csv
import json
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from shared import __version__

TOOL_NAME = "gle-memory-lab"
SCHEMA_VERSION = 1

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArtifactMetadata:
    config_sha256: str
    tool_version: str = __version__

    def comment_line(self) -> str:
        return f"# tool={TOOL_NAME} {self.tool_version} config_sha256={self.config_sha256}"

    def as_dict(self) -> dict[str, str]:
        return {"tool": TOOL_NAME, "tool_version": self.tool_version, "config_sha256": self.config_sha256}


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool | np.bool_):
        return "true" if value else "false"
    if isinstance(value, int | np.integer):
        return str(int(value))
    if isinstance(value, float | np.floating):
        return repr(float(value))
    return str(value)


def plain(value: Any) -> Any:
    """Recursively turn numpy scalars/arrays into JSON-safe Python values; NaN and infinities become None."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, float | np.floating):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_csv(
    file_path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    metadata: ArtifactMetadata,
) -> dict:
    """
    Writes rows to a CSV artifact preceded by the metadata comment and header.

    Args:
        file_path: Destination path; parent directories are created.
        header: Column names.
        rows: Row tuples matching the header.
        metadata: Tool version and config hash embedded in the first line.

    Returns:
        A dictionary containing "status" ('success' or 'error') and the "file_path" if successful.
    """
    path = Path(file_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        count = 0
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(metadata.comment_line() + "\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                if len(row) != len(header):
                    raise ValueError(f"row {count + 1} has {len(row)} cells for {len(header)} columns")
                writer.writerow([_cell(v) for v in row])
                count += 1
        logger.info("Wrote %d rows to %s", count, path)
        return {"status": "success", "file_path": str(path), "rows": count}
    except (OSError, TypeError, ValueError) as e:
        logger.error("Error writing CSV %s: %s", path, e)
        return {"status": "error", "file_path": str(path), "error": str(e)}


def write_json(file_path: str | Path, payload: dict[str, Any], metadata: ArtifactMetadata) -> dict:
    """
    Writes a JSON artifact with sorted keys, two-space indent, ``schema_version`` and ``metadata``.

    Returns:
        A dictionary containing "status" ('success' or 'error') and the "file_path" if successful.
    """
    path = Path(file_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        document = {"schema_version": SCHEMA_VERSION, **plain(payload), "metadata": metadata.as_dict()}
        text = json.dumps(document, sort_keys=True, indent=2, allow_nan=False)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text + "\n")
        logger.info("Wrote %s", path)
        return {"status": "success", "file_path": str(path)}
    except (OSError, TypeError, ValueError) as e:
        logger.error("Error writing JSON %s: %s", path, e)
        return {"status": "error", "file_path": str(path), "error": str(e)}
