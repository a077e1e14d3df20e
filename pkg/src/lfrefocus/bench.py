"""Host wall-clock benchmark of the stream kernel backends.

These numbers describe this software on this machine.  They are unrelated to
the hardware cycle model in :mod:`lfrefocus.timing`.
"""

from __future__ import annotations

import time

import numpy as np

from .core import RefocusShift
from .fir import run_stream
from .kernels import BACKENDS
from .oracle import InterpMode, PrecisionMode
from .switching import gen_switch_matrix


def bench_kernels(shift: RefocusShift, length: int = 3201, rows: int = 8, repeats: int = 3,
                  interp: InterpMode = InterpMode.NEAREST,
                  prec: PrecisionMode = PrecisionMode.EXACT, seed: int = 0) -> dict:
    """Best-of-``repeats`` seconds per backend for ``rows`` rows of ``length`` samples.

    Also checks that every backend returns identical results.
    """
    matrix = gen_switch_matrix(shift, interp)
    data = np.random.default_rng(seed).integers(0, 256, size=(rows, length))
    timings, reference = {}, None
    for name in sorted(BACKENDS):
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            out = [run_stream(matrix, r, prec=prec, backend=name) for r in data]
            best = min(best, time.perf_counter() - t0)
        stacked = np.stack([o.values for o in out]), np.stack([o.valid for o in out])
        if reference is None:
            reference = stacked
        elif not (np.array_equal(reference[0], stacked[0]) and np.array_equal(reference[1], stacked[1])):
            raise AssertionError(f"backend {name} disagrees with {sorted(BACKENDS)[0]}")
        timings[name] = best
    report = {
        "shift": str(shift),
        "interp": InterpMode(interp).value,
        "precision": PrecisionMode(prec).value,
        "rows": rows,
        "length": length,
        "seconds": timings,
        "samples_per_second": {k: rows * length / v for k, v in timings.items()},
    }
    if "cython" in timings and "python" in timings:
        report["speedup"] = timings["python"] / timings["cython"]
    return report
