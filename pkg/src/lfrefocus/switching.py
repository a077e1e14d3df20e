"""Switch-state matrices for the switch-driven FIR distribution network.

Row ``p`` of a matrix is loaded while an input sample of phase ``p`` (its
position inside the micro image) is broadcast.  Column ``w`` closes the switch
in front of processing element ``w``; a value entering PE ``w`` reaches the
module output ``W - 1 - w`` clock cycles later.  The write-enable pattern is
indexed by the phase of the *output* sample and is low wherever the output
would merely repeat the previous one (NN micro image repetition).

For linear interpolation the entries are integer weights in ``0..M`` rather
than switch bits; the network is otherwise identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import LightfieldError, RefocusShift
from .oracle import InterpMode, interp_scale, refocus_1d, taps


@dataclass(frozen=True, eq=False)
class SwitchMatrix:
    shift: RefocusShift
    states: np.ndarray          # (M, W) int
    we_pattern: np.ndarray      # (M,) bool, by output phase
    latency: int                # output k leaves the adder chain at input time k + latency
    interp: InterpMode = InterpMode.NEAREST

    @property
    def M(self) -> int:
        return self.states.shape[0]

    @property
    def width(self) -> int:
        return self.states.shape[1]

    @property
    def scale(self) -> int:
        return interp_scale(self.shift.M, self.interp)

    def expected_terms(self) -> np.ndarray:
        """Number of non-zero contributions to a full sum, per output phase."""
        M, W = self.states.shape
        counts = np.zeros(M, dtype=np.int64)
        for r in range(M):
            n = r + self.latency  # input-time of emission, any representative
            counts[r] = sum(
                1 for w in range(W) if self.states[(n - (W - 1 - w)) % M, w]
            )
        return counts

    def to_dict(self) -> dict:
        return {
            "shift": str(self.shift),
            "M": self.M,
            "W": self.width,
            "interp": InterpMode(self.interp).value,
            "latency": self.latency,
            "rows": self.states.tolist(),
            "we": [int(b) for b in self.we_pattern],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_table(self) -> str:
        M, W = self.states.shape
        lines = [f"s({self.shift}, w, p)  W={W}  interp={InterpMode(self.interp).value}"]
        lines.append("  p | " + " ".join(f"{w:>2}" for w in range(W)) + " | we")
        for p in range(M):
            cells = " ".join(f"{int(s):>2}" for s in self.states[p])
            lines.append(f"{p:>3} | {cells} | {int(self.we_pattern[p])}")
        return "\n".join(lines)


def _write_phases(shift: RefocusShift, interp: InterpMode) -> np.ndarray:
    M = shift.M
    base = 4 * M  # any k works; the pattern is M-periodic
    we = np.zeros(M, dtype=bool)
    for k in range(base, base + M):
        we[k % M] = taps(k, shift, interp) != taps(k - 1, shift, interp)
    return we


def gen_switch_matrix(shift: RefocusShift, interp: InterpMode = InterpMode.NEAREST) -> SwitchMatrix:
    """Derive the matrix from the refocus tap geometry.

    For every write-enabled output ``k`` and every input ``m`` it reads, the
    input's phase row gets a closed switch at the column whose delay to the
    output is ``k - m + latency``.
    """
    if shift.numerator < 0:
        raise LightfieldError("negative shifts are not supported")
    interp = InterpMode(interp)
    M = shift.M
    we = _write_phases(shift, interp)
    entries: dict[tuple[int, int], int] = {}
    base = 4 * M
    for k in range(base, base + M):
        if not we[k % M]:
            continue
        for m, weight in taps(k, shift, interp).items():
            entries[(m % M, k - m)] = weight
    offsets = [off for _, off in entries]
    latency = -min(offsets)
    W = max(offsets) - min(offsets) + 1
    states = np.zeros((M, W), dtype=np.int64)
    for (p, off), weight in entries.items():
        states[p, W - 1 - (off + latency)] = weight
    return SwitchMatrix(shift, states, we, latency, interp)


def tap_width(shift: RefocusShift, interp: InterpMode = InterpMode.NEAREST) -> int:
    return gen_switch_matrix(shift, interp).width


def validate_matrix(m: SwitchMatrix, rng: np.random.Generator | None = None) -> list[str]:
    """Structural checks plus a short oracle-equivalence smoke run."""
    problems = []
    states = np.asarray(m.states)
    M = m.shift.M
    if states.ndim != 2:
        return [f"shape: states must be 2-D, got {states.shape}"]
    if states.shape[0] != M:
        problems.append(f"rows: expected {M} phase rows, got {states.shape[0]}")
    if len(m.we_pattern) != states.shape[0]:
        problems.append("we: write-enable pattern length differs from row count")
    hi = 1 if InterpMode(m.interp) is InterpMode.NEAREST else M
    if states.size and (states.min() < 0 or states.max() > hi):
        problems.append(f"entries: values must lie in [0, {hi}]")
    for p, row in enumerate(states):
        ones = int(np.count_nonzero(row))
        if ones == 0:
            problems.append(f"row {p}: no closed switch")
        elif ones > (M if hi == 1 else 2 * M):
            problems.append(f"row {p}: {ones} closed switches exceed the limit")
    if not problems:
        try:
            expected = gen_switch_matrix(m.shift, m.interp)
        except LightfieldError as exc:
            return [str(exc)]
        if states.shape[1] != expected.width:
            problems.append(f"width: W={states.shape[1]} inconsistent with shift {m.shift} "
                            f"(expected {expected.width})")
    if problems:
        return problems

    from .fir import run_stream  # local import: fir depends on this module

    rng = rng or np.random.default_rng(0)
    row = rng.integers(0, 256, size=max(4 * M, 2 * m.width + 2 * M) // M * M)
    got = run_stream(m, row)
    want = refocus_1d(row, m.shift, m.interp)
    both = got.valid & want.valid
    if not both.any():
        problems.append("equivalence: smoke row has no valid outputs")
    elif not np.array_equal(got.values[both], want.values[both]):
        problems.append("equivalence: filter output differs from the reference refocus")
    return problems
