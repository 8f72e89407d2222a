"""Numba availability and the pure-numpy fallback switch.

Set ``QSL_DISABLE_NUMBA=1`` before import to force the numpy kernels even when
numba is installed. Both paths produce the same results; the PRNG and the
index/counting kernels are bit-identical, floating point kernels agree to
rounding.
"""

import os

_FLAG = os.environ.get("QSL_DISABLE_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _FLAG not in ("", "0", "false", "no")

# TBB in common base images is too old for numba and warns on every import.
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED_BY_ENV


def njit(*args, **kwargs):
    """``numba.njit`` with caching on, or a no-op decorator without numba."""
    kwargs.setdefault("cache", True)
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


prange = numba.prange if HAVE_NUMBA else range


def set_threads(threads: int | None) -> int:
    """Set the numba worker count (clamped to what numba was started with)."""
    if not HAVE_NUMBA:
        return 1
    limit = numba.config.NUMBA_NUM_THREADS
    if threads is None:
        env = os.environ.get("QSL_THREADS")
        threads = int(env) if env else limit
    threads = max(1, min(int(threads), limit))
    numba.set_num_threads(threads)
    return threads


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
