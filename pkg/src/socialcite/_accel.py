"""Numba availability and the environment switch selecting the kernel backend.

Set ``SOCIALCITE_NUMBA=0`` to force the pure-numpy kernels even when numba is
installed. The flag is read once, at import time.
"""

import os

try:
    from numba import njit

    NUMBA_INSTALLED = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_INSTALLED = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def _flag_enabled(value: str) -> bool:
    return value.strip().lower() not in ("0", "false", "no", "off", "")


USE_NUMBA = NUMBA_INSTALLED and _flag_enabled(os.environ.get("SOCIALCITE_NUMBA", "1"))


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
