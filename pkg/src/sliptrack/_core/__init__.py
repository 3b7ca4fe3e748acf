"""Backend selection for the hot kernels.

The compiled extension is used when it imported cleanly and the
environment variable SLIPTRACK_PURE_PYTHON is unset.  Both backends are
bit-identical by construction (see tests/test_backends.py), so the
switch only affects speed.
"""

import os

from ._pykernels import project_polyline as py_project_polyline
from ._pykernels import wrap_angle

HAVE_COMPILED = False
project_polyline = py_project_polyline
run_fixed_episode = None

if os.environ.get("SLIPTRACK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels

        project_polyline = _kernels.project_polyline
        run_fixed_episode = _kernels.run_fixed_episode
        HAVE_COMPILED = True
    except ImportError:
        pass

BACKEND = "compiled" if HAVE_COMPILED else "python"

__all__ = [
    "BACKEND",
    "HAVE_COMPILED",
    "project_polyline",
    "py_project_polyline",
    "run_fixed_episode",
    "wrap_angle",
]
