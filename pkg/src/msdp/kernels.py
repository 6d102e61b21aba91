"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise, or when
``MSDP_PURE_PYTHON=1`` is set, the pure-Python implementations are used.
"""

import os

from . import _fallback as fallback

try:
    from . import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and os.environ.get("MSDP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    _impl = compiled
    BACKEND = "cython"
else:
    _impl = fallback
    BACKEND = "python"

smith_waterman = _impl.smith_waterman
es_vector = _impl.es_vector
es_permutation = _impl.es_permutation

__all__ = ["BACKEND", "compiled", "fallback", "smith_waterman", "es_vector", "es_permutation"]
