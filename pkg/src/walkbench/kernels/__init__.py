"""First-passage simulation kernels.

The compiled kernel is used when it was built; otherwise, or when the
environment variable ``WALKBENCH_PURE_PYTHON`` is set, the numpy
implementation is used. Both give bit-identical results.
"""

import os

from ..errors import ValidationError
from . import _walk_py

try:
    if os.environ.get("WALKBENCH_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from . import _walk_cy
except ImportError:
    _walk_cy = None

BACKENDS = {"python": _walk_py.run_chunk}
if _walk_cy is not None:
    BACKENDS["cython"] = _walk_cy.run_chunk

BACKEND = "cython" if _walk_cy is not None else "python"


def get_kernel(backend=None):
    """Return the ``run_chunk`` implementation for ``backend`` (default: best available)."""
    name = BACKEND if backend is None else backend
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValidationError(f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
