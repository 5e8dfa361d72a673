"""Kernel backend selection: numba-jitted hot loops with a pure-numpy fallback.

The jitted and plain paths share one source function each; ``maybe_jit``
returns the numba-compiled version unless numba is unavailable or the
environment opts out.

Environment:
    SINNET_NUMBA    "0" forces the pure-numpy path (default: jit when numba
                    is importable).
    SINNET_THREADS  positive integer; caps numba's thread pool and the
                    draw-level worker pool used by the empirical estimators.
"""

from __future__ import annotations

import os

NUMBA_ENABLED = os.environ.get("SINNET_NUMBA", "1") != "0"

if NUMBA_ENABLED:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba = None
        NUMBA_ENABLED = False
else:
    numba = None

if NUMBA_ENABLED and "SINNET_THREADS" in os.environ:
    _n = int(os.environ["SINNET_THREADS"])
    if _n < 1:
        raise ValueError("SINNET_THREADS must be a positive integer")
    numba.set_num_threads(min(_n, numba.config.NUMBA_NUM_THREADS))


def maybe_jit(fn):
    """Compile ``fn`` with numba when enabled, else return it unchanged."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True, fastmath=False)(fn)
    return fn


def worker_count() -> int:
    """Worker cap for embarrassingly parallel loops (draws, batch shards)."""
    env = os.environ.get("SINNET_THREADS")
    if env is not None:
        n = int(env)
        if n < 1:
            raise ValueError("SINNET_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1
