"""Select the max-flow kernel backend at import time.

The compiled extension is preferred when importable; the pure-Python kernel
is the fallback.  Set ``CLASSMATCH_PURE=1`` to force the fallback (used by
the kernel benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _pyflow

if os.environ.get("CLASSMATCH_PURE"):
    _impl = _pyflow
else:
    try:
        from . import _fastflow as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pyflow

BACKEND: str = _impl.BACKEND
run_max_flow = _impl.run_max_flow


def available_backends() -> dict[str, object]:
    """Importable kernels by name (used by tests and the benchmark)."""
    backends: dict[str, object] = {"python": _pyflow.run_max_flow}
    try:
        from . import _fastflow

        backends["cython"] = _fastflow.run_max_flow
    except ImportError:
        pass
    return backends
