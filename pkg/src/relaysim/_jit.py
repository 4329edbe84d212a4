"""Optional numba acceleration.

Set ``RELAYSIM_DISABLE_JIT=1`` to run the kernels as plain Python/numpy
(also used automatically when numba cannot be imported).
"""

import logging
import os

logger = logging.getLogger(__name__)

JIT_ENV_FLAG = "RELAYSIM_DISABLE_JIT"

_disabled = os.environ.get(JIT_ENV_FLAG, "").strip().lower() not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    import numba
except ImportError:
    numba = None

JIT_ENABLED = numba is not None

if JIT_ENABLED:

    def njit(func):
        return numba.njit(cache=True, nogil=True)(func)

else:
    if not _disabled:
        logger.warning("numba not available; running kernels in pure Python")

    def njit(func):
        return func
