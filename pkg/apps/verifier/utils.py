"""
Utility functions for the verifier application.
Artifact file handling and engine settings lookup.
"""
import os
from pathlib import Path

from django.conf import settings
import logging

logger = logging.getLogger('verifier.services')

ENGINE_DEFAULTS = {
    'SAT_SOLVER': 'm22',
    'DEFAULT_TIMEOUT_S': None,
    'DEFAULT_MAX_FRAMES': None,
    'DEFAULT_MAX_OBLIGATIONS': None,
    'MATRIX_WORKERS': 1,
    'EXPLICIT_LATCH_LIMIT': 20,
    'MAXIMUM_TEST_CAP': 1024,
    'ARTIFACT_DIR': 'artifacts',
    'PERSIST_RUNS': True,
}


def engine_setting(key):
    """
    Look up an engine setting from ``settings.SECIC3``.

    Args:
        key (str): Setting name, e.g. SAT_SOLVER

    Returns:
        The configured value, or the built-in default
    """
    configured = getattr(settings, 'SECIC3', {})
    if key in configured:
        return configured[key]
    return ENGINE_DEFAULTS[key]


def read_artifact(path):
    """Read a text artifact; raises OSError when the file is missing or unreadable."""
    with open(path, 'rb') as handle:
        return handle.read()


def write_artifact(path, content):
    """
    Write a text artifact, creating parent directories as needed.

    Args:
        path (str): Destination file
        content (str | bytes): File content
    """
    if isinstance(content, str):
        content = content.encode('utf-8')
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, 'wb') as handle:
        handle.write(content)
    logger.debug(f"Wrote {len(content)} bytes to {path}")


def default_pairing_path(circuit_path):
    """The ``<stem>.pair`` sidecar next to a circuit file, if it exists."""
    candidate = Path(circuit_path).with_suffix('.pair')
    return str(candidate) if candidate.is_file() else None


def instance_name(family, size, constrained=True):
    """
    Name of a generated benchmark instance.

    Returns:
        str: e.g. ``mux_reg_4`` or ``mux_reg_4_free`` for unconstrained instances
    """
    suffix = '' if constrained else '_free'
    return f"{family}_{size}{suffix}"


def format_key_values(values):
    """Render an ordered mapping as ``key=value`` tokens; lists are comma-joined."""
    tokens = []
    for key, value in values.items():
        if isinstance(value, (list, tuple)):
            value = ','.join(str(item) for item in value)
        tokens.append(f"{key}={value}")
    return tokens
