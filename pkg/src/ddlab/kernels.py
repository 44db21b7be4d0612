"""Backend selection for the hot kernels.

The compiled extension (``ddlab._kernels``, Cython) is preferred when it
imported cleanly; the pure-Python twin is the fallback and the reference.
Setting the environment variable ``DDLAB_PURE=1`` forces the fallback, which
the backend-agreement tests and the benchmark use.
"""

import os

from . import _kernels_py

if os.environ.get("DDLAB_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

cnf_truth_table = _impl.cnf_truth_table
obdd_size_for_order = _impl.obdd_size_for_order


def count_ones(table):
    return table.bit_count()
