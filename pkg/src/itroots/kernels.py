"""Kernel selection: compiled extension if importable, else pure Python.

Set ``ITROOTS_PURE_PYTHON=1`` to force the fallback.
"""

import os

from itroots import _kernels_py

COMPILED = False
_impl = _kernels_py

if os.environ.get("ITROOTS_PURE_PYTHON") != "1":
    try:
        from itroots import _kernels as _impl  # noqa: F811

        COMPILED = True
    except ImportError:
        _impl = _kernels_py

compose = _impl.compose
square_roots_full = _impl.square_roots_full
square_roots_pruned = _impl.square_roots_pruned
perm_power = _impl.perm_power
perm_roots_exist = _impl.perm_roots_exist
