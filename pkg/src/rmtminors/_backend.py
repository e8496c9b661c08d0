"""Kernel backend selection.

``RMTMINORS_BACKEND=numpy`` forces the vectorized numpy kernels; any other
value (or unset) uses the numba kernels when numba imports cleanly.
"""

import importlib
import os

ENV_VAR = "RMTMINORS_BACKEND"


def _select():
    wanted = os.environ.get(ENV_VAR, "numba").strip().lower()
    if wanted != "numpy":
        try:
            return importlib.import_module("rmtminors._kernels_numba")
        except ImportError:
            pass
    return importlib.import_module("rmtminors._kernels_numpy")


kernels = _select()
BACKEND = kernels.NAME


def get_kernels(name):
    """Return a kernel module by name ('numba' or 'numpy'), ignoring the env flag."""
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    return importlib.import_module(f"rmtminors._kernels_{name}")
