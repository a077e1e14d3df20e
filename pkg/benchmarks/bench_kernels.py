"""Compare the compiled and pure-Python stream kernels on full-width rows.

Usage: python3 benchmarks/bench_kernels.py [--length 3201] [--rows 8]
"""

import argparse
import json

from lfrefocus.bench import bench_kernels
from lfrefocus.core import RefocusShift
from lfrefocus.kernels import BACKENDS


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=3201)
    ap.add_argument("--rows", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    if "cython" not in BACKENDS:
        print("compiled kernel not built; only the Python backend is timed")
    for shift, interp in (("1/11", "nn"), ("7/11", "nn"), ("7/11", "linear")):
        rep = bench_kernels(RefocusShift.parse(shift), args.length, args.rows, args.repeats, interp)
        print(json.dumps(rep))


if __name__ == "__main__":
    main()
