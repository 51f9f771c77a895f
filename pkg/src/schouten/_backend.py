"""Kernel backend selection.

The compiled :mod:`schouten._kernels` extension is used when it imports;
otherwise the numpy fallback is used. ``SCHOUTEN_BACKEND=python`` forces the
fallback (useful for benchmarking and for cross-checking the two).
"""
import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)


def _load():
    if os.environ.get("SCHOUTEN_BACKEND", "").lower() == "python":
        return _kernels_py
    try:
        from . import _kernels
    except ImportError:  # extension not built
        log.debug("compiled kernels unavailable, using numpy fallback")
        return _kernels_py
    return _kernels


kernels = _load()
BACKEND = kernels.BACKEND

esp_table = kernels.esp_table
esp_deleted = kernels.esp_deleted
radial_system = kernels.radial_system
