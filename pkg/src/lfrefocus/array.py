"""Parallel 2-D array of FIR modules: row modules, a row buffer, column modules.

Functional results come from clocking every row and column through the FIR
kernel.  Cycle counts come from an event schedule of the same array:

* ``iota_r = min(iota, L)`` row modules; row ``l`` goes to module
  ``l mod iota_r`` and a module streams its rows back to back, one sample per
  PCLK.  A row finishes ``K - 1 + Lambda + W`` cycles after its first sample.
* Once every row of the frame has left the row modules the column sweep
  starts (time ``T1``).  Column ``k`` goes to module ``m = k mod iota_c`` as
  its ``j = k // iota_c``-th job and starts at ``T1 + m + j * L``; the ``m``
  cycle offset is the skew of the register array feeding the columns.
* The next frame's sweep may start once the previous sweep has consumed its
  last sample and the column module it needs is free.

With maximal parallelism and ``W = M`` this reproduces
``eta = 2(Lambda + M) + 2(K - 1) + (L - 1)`` for the first frame and
``eta_sub = (K - 1) + (L - 1)`` between frames (for ``K, L >= 2``).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .core import LightfieldError, LightfieldImage, RefocusShift, require_valid
from .fir import run_stream
from .oracle import InterpMode, PrecisionMode, interp_scale, round_half_up
from .switching import SwitchMatrix, gen_switch_matrix


@dataclass(frozen=True)
class ArrayConfig:
    """``parallel_degree`` is a positive int or ``"max"`` (one module per row/column)."""

    parallel_degree: int | str
    shift: RefocusShift
    prec: PrecisionMode = PrecisionMode.EXACT
    interp: InterpMode = InterpMode.NEAREST
    mult_latency: int = 1
    trailing_skew: bool = False
    workers: int = 1
    backend: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "prec", PrecisionMode(self.prec))
        object.__setattr__(self, "interp", InterpMode(self.interp))
        iota = self.parallel_degree
        if isinstance(iota, str):
            if iota != "max":
                raise LightfieldError(f"parallel degree must be a positive integer or 'max', got {iota!r}")
        elif int(iota) != iota or iota < 1:
            raise LightfieldError(f"parallel degree must be a positive integer, got {iota!r}")
        if self.workers < 1:
            raise LightfieldError("workers must be positive")
        if self.mult_latency < 1:
            raise LightfieldError("multiply stage needs at least one cycle")

    def resolve_iota(self, K: int, L: int) -> int:
        if self.parallel_degree == "max":
            return max(K, L)
        iota = int(self.parallel_degree)
        if iota > max(K, L):
            raise LightfieldError(f"parallel degree {iota} exceeds max(K, L) = {max(K, L)}")
        return iota


class FrameResult(NamedTuple):
    image: np.ndarray
    valid: np.ndarray
    first_frame_cycles: int
    steady_state_cycles: int
    iota: int
    alignment_cycles: int = 0


@dataclass
class _Schedule:
    """Event-level timing of the array across consecutive frames."""

    K: int
    L: int
    iota: int
    fill: int  # Lambda + W: cycles from a stream's last sample to its last output

    def __post_init__(self):
        self.iota_r = min(self.iota, self.L)
        self.iota_c = min(self.iota, self.K)
        self.row_free = [0] * self.iota_r
        self.col_free = [0] * self.iota_c
        self.sweep_end = 0
        self.completions: list[int] = []

    def add_frame(self) -> int:
        K, L = self.K, self.L
        rows_done = 0
        for l in range(L):
            m = l % self.iota_r
            start = self.row_free[m]
            self.row_free[m] = start + K
            rows_done = max(rows_done, start + (K - 1) + self.fill)
        t1 = max(rows_done, self.sweep_end)
        done = last_input = 0
        for k in range(K):
            m, j = k % self.iota_c, k // self.iota_c
            start = max(t1 + m + j * L, self.col_free[m])
            self.col_free[m] = start + L
            last_input = max(last_input, start + L - 1)
            done = max(done, start + (L - 1) + self.fill)
        self.sweep_end = last_input
        self.completions.append(done)
        return done


def frame_cycles(K: int, L: int, iota: int, width: int, mult_latency: int = 1,
                 frames: int = 2) -> list[int]:
    """Completion cycle of each of ``frames`` back-to-back frames."""
    s = _Schedule(K, L, iota, mult_latency + width)
    for _ in range(frames):
        s.add_frame()
    return s.completions


def _map(fn, items, workers):
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _pass(planes: np.ndarray, matrix: SwitchMatrix, cfg: ArrayConfig, raw: bool):
    """Run every line of a (C, N, len) stack through its own FIR stream."""
    C, N, _ = planes.shape
    jobs = [(c, i) for c in range(C) for i in range(N)]

    def one(job):
        c, i = job
        return run_stream(matrix, planes[c, i], prec=cfg.prec, mult_latency=cfg.mult_latency,
                          raw=raw, backend=cfg.backend)

    results = _map(one, jobs, cfg.workers)
    values = np.stack([r.values for r in results]).reshape(planes.shape)
    valid = np.stack([r.valid for r in results]).reshape(planes.shape)
    return values, valid


def _check_geometry(img: LightfieldImage, cfg: ArrayConfig) -> None:
    require_valid(img)
    if img.micro_size != cfg.shift.M:
        raise LightfieldError(f"shift {cfg.shift} does not match image micro size {img.micro_size}")


def process_frame(img: LightfieldImage, cfg: ArrayConfig) -> FrameResult:
    """Refocus one frame on the simulated module array."""
    return process_sequence([img], cfg)[0]


def process_sequence(frames: Iterable[LightfieldImage], cfg: ArrayConfig) -> list[FrameResult]:
    """Refocus a stream of equally sized frames, pipelined through the array.

    Every result carries the first frame's completion cycle.  For frame
    ``f >= 1`` ``steady_state_cycles`` is the gap to the previous completion;
    frame 0 reports the gap a following frame would see.
    """
    frames = list(frames)
    if not frames:
        return []
    geom = (frames[0].channels, frames[0].height, frames[0].width)
    for f in frames:
        _check_geometry(f, cfg)
        if (f.channels, f.height, f.width) != geom:
            raise LightfieldError(f"frame geometry {(f.channels, f.height, f.width)} differs from {geom}")
    _, L, K = geom
    iota = cfg.resolve_iota(K, L)
    matrix = gen_switch_matrix(cfg.shift, cfg.interp)
    M = cfg.shift.M
    sched = _Schedule(K, L, iota, cfg.mult_latency + matrix.width)
    for _ in range(max(len(frames), 2)):
        sched.add_frame()
    done = sched.completions
    align = min(iota, K) - 1 if cfg.trailing_skew else 0

    raw = cfg.prec is PrecisionMode.EXACT
    out = []
    for f_idx, img in enumerate(frames):
        px = np.asarray(img.pixels, dtype=np.int64)
        rows, row_ok = _pass(px, matrix, cfg, raw)
        cols, col_ok = _pass(np.ascontiguousarray(np.swapaxes(rows, -1, -2)), matrix, cfg, raw)
        image = np.swapaxes(cols, -1, -2)
        if raw:
            image = round_half_up(image, (M * interp_scale(M, cfg.interp)) ** 2)
        valid = row_ok[0] & np.swapaxes(col_ok[0], -1, -2)
        steady = done[f_idx] - done[f_idx - 1] if f_idx else done[1] - done[0]
        out.append(FrameResult(image.astype(np.uint8), valid, done[0], steady, iota, align))
    return out
