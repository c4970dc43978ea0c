"""Selects the compiled quadrature kernel when it is importable.

Set ``SOFTARRAY_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _quadrature_py

BACKEND = "python"
projected_lengths = _quadrature_py.projected_lengths

if os.environ.get("SOFTARRAY_PURE_PYTHON", "").strip() not in ("1", "true", "yes"):
    try:
        from . import _quadrature as _compiled
    except ImportError:  # extension not built
        pass
    else:
        projected_lengths = _compiled.projected_lengths
        BACKEND = "cython"

__all__ = ["BACKEND", "projected_lengths"]
