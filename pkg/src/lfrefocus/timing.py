"""Closed-form cycle-count and latency model for the 2-D module array.

Counts assume maximal parallelisation (one module per row and per column).
The benchmark figures below are published reference constants, not host
measurements; see ``lfrefocus.bench`` for wall-clock timing of this package.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .core import LightfieldError


@dataclass(frozen=True)
class ReferenceRow:
    label: str
    clock_hz: float
    frame_time_s: float


# Reported frame times for a 3201 x 3201 lightfield with M = 11.
PROPOSED_FPGA = ReferenceRow("module-array FPGA", 100e6, 96.2e-6)
PRIOR_FPGA = ReferenceRow("prior FPGA design", 100e6, 105.9e-3)
GPU_SHADER = ReferenceRow("GPU shader", 1.35e9, 1.38e-3)
MATLAB_CPU = ReferenceRow("Matlab CPU", 3.40e9, 12.1)
REFERENCE_ROWS = (PROPOSED_FPGA, PRIOR_FPGA, GPU_SHADER, MATLAB_CPU)


@dataclass(frozen=True)
class TimingParams:
    M: int
    K: int
    L: int
    t_pclk: float = 10e-9
    mult_cycles: int = 1
    iota: int | None = None

    def __post_init__(self):
        for name in ("M", "K", "L", "mult_cycles"):
            if getattr(self, name) < 1:
                raise LightfieldError(f"{name} must be positive")
        if self.t_pclk <= 0:
            raise LightfieldError("pixel clock period must be positive")
        if self.iota is not None and self.iota < 1:
            raise LightfieldError("parallel degree must be positive")


@dataclass(frozen=True)
class TimingReport:
    eta: int
    eta_sub: int
    latency_first: float
    latency_sub: float
    params: TimingParams
    references: tuple = field(default=REFERENCE_ROWS)

    def delay_reduction_vs(self, ref: ReferenceRow) -> float:
        """Percentage of ``ref``'s frame time saved by the modelled design."""
        return 100.0 * (1.0 - self.latency_first / ref.frame_time_s)

    def speedup_vs(self, ref: ReferenceRow) -> float:
        if self.latency_first == 0:
            return float("inf")
        return ref.frame_time_s / self.latency_first

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "eta_sub": self.eta_sub,
            "latency_first_s": self.latency_first,
            "latency_sub_s": self.latency_sub,
            "params": asdict(self.params),
            "references": [
                {
                    **asdict(r),
                    "speedup": self.speedup_vs(r),
                    "delay_reduction_pct": self.delay_reduction_vs(r),
                }
                for r in self.references
            ],
        }

    def to_table(self) -> str:
        p = self.params
        lines = [
            f"M={p.M} K={p.K} L={p.L} T_PCLK={p.t_pclk * 1e9:g} ns  Lambda={p.mult_cycles}",
            f"first frame : eta     = {self.eta:>8d} cycles  {self.latency_first * 1e6:10.2f} us",
            f"next frames : eta_sub = {self.eta_sub:>8d} cycles  {self.latency_sub * 1e6:10.2f} us",
            "",
            f"{'reference':<22}{'clock':>10}{'frame time':>14}{'speedup':>13}{'reduction':>11}",
        ]
        for r in self.references:
            lines.append(
                f"{r.label:<22}{r.clock_hz / 1e6:>7g} MHz{_fmt_seconds(r.frame_time_s):>14}"
                f"{self.speedup_vs(r):>12.2f}x{self.delay_reduction_vs(r):>10.2f}%"
            )
        return "\n".join(lines)


def _fmt_seconds(t: float) -> str:
    if t >= 1:
        return f"{t:.3g} s"
    if t >= 1e-3:
        return f"{t * 1e3:.4g} ms"
    return f"{t * 1e6:.4g} us"


def steps_first_frame(p: TimingParams) -> int:
    """``2(Lambda + M) + 2(K - 1) + (L - 1)``."""
    return 2 * (p.mult_cycles + p.M) + 2 * (p.K - 1) + (p.L - 1)


def steps_subsequent(K: int, L: int) -> int:
    return (L - 1) + (K - 1)


def latency(cycles: int, t_pclk: float) -> float:
    if t_pclk <= 0:
        raise LightfieldError("pixel clock period must be positive")
    return cycles * t_pclk


def benchmark_report(p: TimingParams) -> TimingReport:
    eta = steps_first_frame(p)
    eta_sub = steps_subsequent(p.K, p.L)
    return TimingReport(eta, eta_sub, latency(eta, p.t_pclk), latency(eta_sub, p.t_pclk), p)
