"""Hot-kernel backend selection.

The compiled Cython module is preferred when present; the pure NumPy
twin is used otherwise. Set ``ORLICZ_PURE_PYTHON=1`` to force the
fallback (used by the benchmark and the backend-agreement tests).
"""

import os

from . import _solve_py

if os.environ.get("ORLICZ_PURE_PYTHON", "") == "1":
    _impl = _solve_py
else:
    try:
        from . import _solve as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _solve_py

BACKEND = _impl.BACKEND_NAME
solve_separable = _impl.solve_separable
legendre_envelope = _impl.legendre_envelope

__all__ = ["BACKEND", "solve_separable", "legendre_envelope"]
