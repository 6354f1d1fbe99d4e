"""Numerov inner loops: compiled extension when built, pure Python otherwise.

Set ``INTERWOVEN_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _numerov_py as python_backend

compiled_backend = None
if not os.environ.get("INTERWOVEN_PURE_PYTHON"):
    try:
        from . import _numerov as compiled_backend  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND_NAME = "cython" if compiled_backend is not None else "python"

count_nodes = backend.count_nodes
shoot = backend.shoot
solution = backend.solution

__all__ = ["count_nodes", "shoot", "solution", "BACKEND_NAME", "python_backend", "compiled_backend"]
