"""Thread caps for BLAS/LAPACK, driven by the DKPCA_THREADS environment variable."""
from __future__ import annotations

import contextlib
import os

from threadpoolctl import threadpool_limits

ENV_VAR = "DKPCA_THREADS"


def configured_threads() -> int | None:
    """Thread cap from the environment; ``None`` leaves library defaults alone."""
    raw = os.environ.get(ENV_VAR, "").strip()
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    return max(n, 1)


@contextlib.contextmanager
def thread_limit(n: int | None = None):
    """Cap native thread pools; ``n=1`` is the deterministic reference mode."""
    if n is None:
        n = configured_threads()
    if n is None:
        yield
        return
    with threadpool_limits(limits=n):
        yield


def reference_mode():
    return thread_limit(1)
