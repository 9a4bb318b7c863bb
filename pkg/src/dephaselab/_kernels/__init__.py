"""Eigensolver kernel with backend selection at import time.

The compiled extension is preferred when built; otherwise the pure-Python
twin takes over transparently.  ``DEPHASELAB_KERNEL`` forces a choice
("cython" or "python"); anything else means automatic.
"""

import os

from dephaselab._kernels import _jacobi_py

_requested = os.environ.get("DEPHASELAB_KERNEL", "auto").strip().lower()

_compiled = None
if _requested in ("auto", "cython"):
    try:
        from dephaselab._kernels import _jacobi_cy as _compiled
    except ImportError:
        _compiled = None

if _requested == "cython" and _compiled is None:
    raise ImportError("compiled kernel requested via DEPHASELAB_KERNEL but not built")

if _requested == "python" or _compiled is None:
    jacobi_eigh = _jacobi_py.jacobi_eigh
    BACKEND = "python"
else:
    jacobi_eigh = _compiled.jacobi_eigh
    BACKEND = "cython"


def backends():
    """Map of importable backend name -> jacobi_eigh implementation."""
    found = {"python": _jacobi_py.jacobi_eigh}
    try:
        from dephaselab._kernels import _jacobi_cy
        found["cython"] = _jacobi_cy.jacobi_eigh
    except ImportError:
        pass
    return found
