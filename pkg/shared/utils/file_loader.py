import logging
import os
from pathlib import Path
from typing import Any

import numpy as np

from shared.errors import InvalidInputError

try:
    import yaml
except ImportError:
    yaml = None

logger = logging.getLogger(__name__)


def load_file_content(file_path: str | Path, fallback: str | None = None) -> str:
    """
    Load the content of a text file.

    Args:
        file_path: The path to the file to be read.
        fallback: Content returned when the file is missing or unreadable.

    Returns:
        The contents of the file or the fallback.
    """
    try:
        with open(file_path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        if fallback is not None:
            logger.warning("File not found or unreadable: %s. Using fallback.", file_path)
            return fallback
        raise InvalidInputError(f"Cannot read {file_path}: {e}") from e


def load_stage_defaults(file_path: str | Path, fallback: dict[str, Any]) -> dict[str, Any]:
    """
    Load a stage's ``defaults.yaml`` merged over ``fallback``.

    Missing or unparsable files yield the fallback with a warning, so a stage
    always has a complete set of numerical defaults.
    """
    merged = dict(fallback)
    if not os.path.isfile(file_path):
        logger.warning("Defaults file not found: %s. Using fallback.", file_path)
        return merged
    if yaml is None:
        logger.warning("PyYAML not available; using fallback defaults for %s.", file_path)
        return merged
    try:
        with open(file_path, encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except Exception as e:
        logger.warning("Failed to parse defaults from %s: %s. Using fallback.", file_path, e)
        return merged
    if not isinstance(data, dict):
        return merged
    merged.update(data)
    return merged


def parse_key_values(text: str, source: str = "<config>") -> dict[str, str]:
    """
    Parse ``key = value`` lines with dotted keys.

    ``#`` starts a comment, blank lines are skipped and later keys override
    earlier ones.
    """
    values: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"{source}:{number}: expected 'key = value', got {raw.strip()!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise InvalidInputError(f"{source}:{number}: empty key")
        values[key] = value.strip()
    return values


def load_config_file(file_path: str | Path) -> dict[str, str]:
    return parse_key_values(load_file_content(file_path), source=str(file_path))


def load_kernel_table(file_path: str | Path) -> np.ndarray:
    """Read a two-column ``t,K`` CSV with a mandatory header into an (n, 2) array."""
    lines = load_file_content(file_path).splitlines()
    content = [i for i, line in enumerate(lines) if line.strip() and not line.lstrip().startswith("#")]
    if not content:
        raise InvalidInputError(f"Kernel table {file_path} is empty")
    header_at = content[0]
    header = [cell.strip().lower() for cell in lines[header_at].split(",")]
    if header != ["t", "k"]:
        raise InvalidInputError(f"Kernel table {file_path} must start with the header 't,K', got {lines[header_at]!r}")
    if len(content) < 2:
        raise InvalidInputError(f"Kernel table {file_path} has a header but no rows")
    try:
        rows = np.loadtxt(file_path, delimiter=",", comments="#", skiprows=header_at + 1, ndmin=2)
    except ValueError as e:
        raise InvalidInputError(f"Kernel table {file_path} is malformed: {e}") from e
    if rows.shape[1] != 2:
        raise InvalidInputError(f"Kernel table {file_path} must have two columns, got {rows.shape[1]}")
    logger.info("Loaded %d kernel samples from %s", rows.shape[0], file_path)
    return rows
