"""Clock-accurate model of one switch-driven semi-systolic FIR module.

Per pixel clock (PCLK) the module performs two PCLKx2 half-cycles:

* ``add``: the stored product of the sample that left the multiply stage is
  broadcast (no latches) to every PE whose switch is closed in row ``p``;
* ``shift``: the adder chain moves one PE towards the output; the last PE's
  partial sum is offered to the output register, which latches it only when
  the write-enable bit of that output's phase is set.

The multiply stage (stored-product lookup) takes ``mult_latency`` PCLKs.
Every partial sum carries a count of real contributions; a latched output is
valid when the count equals the number of taps of a full sum, so startup and
end-of-stream transients come out flagged invalid.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .core import LightfieldError
from .kernels import get_kernel
from .oracle import PrecisionMode, check_sum_only, finish, stored_product_lut
from .switching import SwitchMatrix


@dataclass(frozen=True)
class ClockedSample:
    value: int
    valid: bool = True
    cycle: int = -1
    index: int = -1


class StreamResult(NamedTuple):
    values: np.ndarray
    valid: np.ndarray
    pclk_cycles: int


@dataclass(eq=False)
class FirModule:
    matrix: SwitchMatrix
    prec: PrecisionMode = PrecisionMode.EXACT
    mult_latency: int = 1
    raw: bool = False
    lut: np.ndarray = field(init=False, repr=False)
    expected: np.ndarray = field(init=False, repr=False)
    registers: list = field(init=False)
    counts: list = field(init=False)
    mult_stage: deque = field(init=False, repr=False)
    out_value: int = field(init=False, default=0)
    out_valid: bool = field(init=False, default=False)
    p: int = field(init=False, default=0)
    pclk: int = field(init=False, default=0)
    cycle_count: int = field(init=False, default=0)
    inputs_seen: int = field(init=False, default=0)
    ended: bool = field(init=False, default=False)
    trace: Callable[[dict], None] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.prec = PrecisionMode(self.prec)
        if self.mult_latency < 1:
            raise LightfieldError("multiply stage needs at least one cycle")
        M, S = self.M, self.matrix.scale
        self.lut = np.stack([stored_product_lut(M, self.prec, w, S) for w in range(S + 1)])
        self.expected = self.matrix.expected_terms()
        self.reset()

    @property
    def M(self) -> int:
        return self.matrix.M

    @property
    def width(self) -> int:
        return self.matrix.width

    @property
    def uses_table(self) -> bool:
        return self.prec is PrecisionMode.HARDWARE

    @property
    def latency(self) -> int:
        """PCLKs from a sample entering to the output it completes being latched."""
        return self.mult_latency + self.matrix.latency

    def reset(self) -> None:
        W = self.width
        self.registers = [0] * W
        self.counts = [0] * W
        self.mult_stage = deque([None] * self.mult_latency)
        self.out_value, self.out_valid = 0, False
        self.p = 0
        self.pclk = 0
        self.cycle_count = 0
        self.inputs_seen = 0
        self.ended = False

    def end_stream(self) -> None:
        self.ended = True

    def _product(self, weight: int, x: int) -> int:
        if self.uses_table:
            return int(self.lut[weight, x])
        return weight * x

    def _finish(self, s: int) -> int:
        if self.raw:
            return s
        return int(finish(np.int64(s), self.M, self.matrix.interp, self.prec))

    def _emit_trace(self, half: str, emitted=None, we=None):
        if self.trace is not None:
            self.trace({
                "cycle": self.cycle_count,
                "pclk": self.pclk,
                "half": half,
                "p": self.p,
                "registers": list(self.registers),
                "emitted": emitted,
                "we": we,
            })


def new_module(matrix: SwitchMatrix, M: int | None = None,
               prec: PrecisionMode = PrecisionMode.EXACT, *, mult_latency: int = 1,
               raw: bool = False, trace=None) -> FirModule:
    """Instantiate a module with zeroed registers, ``p`` at phase zero of the first input."""
    if M is not None and M != matrix.M:
        raise LightfieldError(f"matrix has {matrix.M} phase rows, module asked for M={M}")
    return FirModule(matrix, prec, mult_latency, raw, trace=trace)


def step_pclk(m: FirModule, sample: ClockedSample | int | None = None) -> ClockedSample | None:
    """Advance ``m`` by one PCLK (two half-cycles).

    ``sample`` is the next raster-order input, or ``None`` for an idle cycle
    (after :meth:`FirModule.end_stream`, only idle cycles are accepted).
    Returns the output register once the first output index is reached.
    """
    if sample is not None:
        if m.ended:
            raise LightfieldError("input sample after end of stream")
        value = sample.value if isinstance(sample, ClockedSample) else int(sample)
        if m.prec is PrecisionMode.HARDWARE and not 0 <= value <= 255:
            raise LightfieldError(f"hardware mode needs 8-bit samples, got {value}")
        if m.prec is PrecisionMode.SUM_ONLY and value > 255 // m.M:
            raise LightfieldError(f"sum-only mode needs samples <= {255 // m.M}, got {value}")
        m.mult_stage.append(value)
        m.inputs_seen += 1
    else:
        m.mult_stage.append(None)
    x = m.mult_stage.popleft()

    # PCLKx2 half-cycle 1: broadcast and add; p is the phase of the newest
    # input, the broadcast sample entered mult_latency cycles earlier
    row = m.matrix.states[(m.p - m.mult_latency) % m.M]
    if x is not None:
        for w, weight in enumerate(row.tolist()):
            if weight:
                m.registers[w] += m._product(weight, x)
                m.counts[w] += 1
    m._emit_trace("add")
    m.cycle_count += 1

    # PCLKx2 half-cycle 2: shift towards the output
    s, cn = m.registers[-1], m.counts[-1]
    m.registers = [0] + m.registers[:-1]
    m.counts = [0] + m.counts[:-1]
    k = m.pclk - m.latency
    out = None
    we = None
    if k >= 0:
        r = k % m.M
        we = bool(m.matrix.we_pattern[r])
        if we:
            m.out_value = m._finish(s)
            m.out_valid = cn == m.expected[r]
        out = ClockedSample(m.out_value, bool(m.out_valid), m.pclk, k)
    m._emit_trace("shift", None if out is None else out.value, we)
    m.cycle_count += 1

    m.pclk += 1
    m.p = (m.p + 1) % m.M
    return out


def _as_module(m, prec, mult_latency, raw) -> FirModule:
    if isinstance(m, FirModule):
        return m
    return new_module(m, prec=prec, mult_latency=mult_latency, raw=raw)


def run_stream(m: FirModule | SwitchMatrix, row, *, prec: PrecisionMode = PrecisionMode.EXACT,
               mult_latency: int = 1, raw: bool = False, backend: str | None = None,
               trace=None) -> StreamResult:
    """Clock a whole row through a fresh copy of the module.

    Output and mask have the input's length; ``pclk_cycles`` counts until the
    last input has left the adder chain.  With NN interpolation a row shorter
    than the module width never fills a complete sum, so it comes out all
    invalid.  Passing ``trace`` (a callable or a
    writable text file for line-delimited JSON) forces the step-by-step path.
    """
    mod = _as_module(m, prec, mult_latency, raw)
    x = np.asarray(row, dtype=np.int64).ravel()
    n = x.shape[0]
    if mod.prec is PrecisionMode.SUM_ONLY:
        check_sum_only(x, mod.M)
    if mod.prec is PrecisionMode.HARDWARE and n and (x.min() < 0 or x.max() > 255):
        raise LightfieldError("hardware mode needs 8-bit input samples")

    if trace is not None:
        sink = trace if callable(trace) else (lambda ev: trace.write(json.dumps(ev) + "\n"))
        mod = new_module(mod.matrix, prec=mod.prec, mult_latency=mod.mult_latency,
                         raw=mod.raw, trace=sink)
        values = np.zeros(n, dtype=np.int64)
        valid = np.zeros(n, dtype=bool)
        total = n + mod.mult_latency + mod.width - 1 if n else 0
        for t in range(total):
            if t == n:
                mod.end_stream()
            out = step_pclk(mod, int(x[t]) if t < n else None)
            if out is not None and out.index < n:
                values[out.index] = out.value
                valid[out.index] = out.valid
        pclk = total
    else:
        kernel = get_kernel(backend)
        sums, ok, pclk = kernel(x, mod.matrix.states, mod.matrix.we_pattern.astype(np.uint8),
                                mod.expected, mod.lut, mod.uses_table,
                                mod.matrix.latency, mod.mult_latency)
        values = sums if mod.raw else finish(sums, mod.M, mod.matrix.interp, mod.prec)
        valid = ok.astype(bool)

    return StreamResult(np.asarray(values, dtype=np.int64), valid, int(pclk))
