"""Backend selection for the stream kernel.

The compiled extension is used when it was built; otherwise, or when
``LFREFOCUS_PURE_PYTHON=1`` is set, the pure-Python kernel is used.
"""

import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _pykernels.run_stream_kernel}
if _compiled is not None:
    BACKENDS["cython"] = _compiled.run_stream_kernel

if _compiled is not None and os.environ.get("LFREFOCUS_PURE_PYTHON", "") not in ("1", "true"):
    BACKEND = "cython"
else:
    BACKEND = "python"


def get_kernel(name=None):
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
