"""Backend selection for the mod-p matrix kernels.

The compiled extension is preferred when it imported cleanly; setting
THETA_GRADE_PURE=1 forces the numpy fallback.  Both backends implement
the same contracts and are compared in benchmarks/bench_kernels.py.
"""

import os

from . import _kernels_py

if os.environ.get("THETA_GRADE_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

matmul = _impl.matmul
matpow = _impl.matpow
rref = _impl.rref
charpoly = _impl.charpoly
