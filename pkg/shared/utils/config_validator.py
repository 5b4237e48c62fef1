import logging
import os
import re
from pathlib import Path

logger = logging.getLogger(__name__)

# dotted lowercase keys: section.name[.sub]
KEY_PATTERN = re.compile(r"^[a-z_][a-z0-9_]*(\.[a-z0-9_]+)*$")

# characters that never belong in a plain-text run config value
CONTROL_PATTERN = re.compile(r"[\x00-\x08\x0b\x0c\x0e-\x1f\x7f]")


def contains_invalid_key(key: str) -> bool:
    """
    Check whether a config key breaks the dotted lowercase form.

    Args:
        key: Key to check, e.g. ``kernel.family``

    Returns:
        True if the key is malformed, False otherwise
    """
    if not key or not isinstance(key, str):
        return True
    if not KEY_PATTERN.match(key):
        logger.warning("Malformed config key: %r", key)
        return True
    return False


def contains_control_characters(text: str) -> bool:
    if not text or not isinstance(text, str):
        return False
    if CONTROL_PATTERN.search(text):
        logger.warning("Control characters in config value %r", text)
        return True
    return False


def validate_override(item: str) -> tuple[bool, str]:
    """
    Validate one ``--set key=value`` override.

    Args:
        item: The raw override text

    Returns:
        Tuple of (is_valid, error_message)
        is_valid: True if the override can be applied
        error_message: Description of the problem, empty string if valid
    """
    if not isinstance(item, str) or "=" not in item:
        return False, f"Override {item!r} must have the form key=value"

    key, value = item.split("=", 1)
    if contains_invalid_key(key.strip()):
        return False, f"Override key {key.strip()!r} must be dotted lowercase, e.g. kernel.alpha"

    if contains_control_characters(value):
        return False, f"Override value for {key.strip()} contains control characters"

    return True, ""


def validate_output_dir(path: str | Path) -> tuple[bool, str]:
    """
    Check that artifacts can be written below ``path``.

    The directory may not exist yet; then its nearest existing parent must be
    a writable directory.

    Returns:
        Tuple of (is_writable, error_message)
    """
    target = Path(path)
    if target.exists():
        if not target.is_dir():
            return False, f"Output path {target} is not a directory"
        if not os.access(target, os.W_OK):
            return False, f"Output directory {target} is not writable"
        return True, ""

    parent = target.absolute().parent
    while not parent.exists():
        parent = parent.parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        return False, f"Cannot create output directory {target}: {parent} is not writable"
    return True, ""
