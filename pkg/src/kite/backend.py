"""Backend selection for the hot loops.

The KITE_BACKEND environment variable picks the implementation:

    auto   (default) numba if importable, else pure numpy
    numba  require the numba kernels (ImportError if numba is missing)
    numpy  force the pure-numpy fallback

Both backends implement identical contracts; `benchmarks/bench_backends.py`
compares them on the large selection workloads.
"""

from __future__ import annotations

import os
import warnings

from . import _np_loops

OK = _np_loops.OK
DEGENERATE = _np_loops.DEGENERATE


def _resolve(choice: str):
    choice = (choice or "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        warnings.warn(
            f"KITE_BACKEND={choice!r} not recognized (expected auto|numba|numpy); "
            "using auto",
            stacklevel=2,
        )
        choice = "auto"
    if choice == "numpy":
        return _np_loops, False
    try:
        from . import _nb_loops
    except ImportError:
        if choice == "numba":
            raise
        return _np_loops, False
    return _nb_loops, True


_impl, using_numba = _resolve(os.environ.get("KITE_BACKEND", "auto"))

backend_name = "numba" if using_numba else "numpy"

lite_loop = _impl.lite_loop
kite_loop = _impl.kite_loop
dpp_loop = _impl.dpp_loop
fps_loop = _impl.fps_loop
