"""Lightfield refocusing and a cycle-accurate model of its FIR filter array."""

from .core import (
    Convention,
    LightfieldError,
    LightfieldImage,
    MicroCoord,
    RefocusShift,
    inverse_translate,
    translate_index,
    validate,
)
from .oracle import (
    InterpMode,
    PrecisionMode,
    integral_projection_1d,
    refocus_1d,
    refocus_2d,
    stored_product_lut,
    upsample_row,
)
from .switching import SwitchMatrix, gen_switch_matrix, tap_width, validate_matrix
from .fir import ClockedSample, FirModule, new_module, run_stream, step_pclk
from .kernels import BACKEND
from .array import ArrayConfig, FrameResult, process_frame, process_sequence
from .timing import TimingParams, TimingReport, benchmark_report, latency, steps_first_frame, steps_subsequent
from .io import read_image, write_image
from .synth import SyntheticSpec, gen_synthetic, sharpness

__version__ = "0.1.0"
