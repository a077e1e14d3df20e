"""Reference spatial-domain refocusing.

Each micro image is upsampled by ``M`` per angular view, every view ``v`` is
shifted by ``-a' * v`` samples on the upsampled grid and the views are
averaged.  The result keeps the raw sensor resolution.  A single phase offset
(see :func:`phase_offset`) aligns all shifts so that each output sample has a
group delay of ``c = (M - 1) // 2`` samples, which is the alignment of the
closed-form filters for ``a in {0/M, 1/M, 2/3}``.

This module is the golden model the clocked filter simulation is checked
against; it is written with numpy over whole rows and never steps a clock.
"""

from __future__ import annotations

from enum import Enum
from math import gcd
from typing import NamedTuple

import numpy as np

from .core import LightfieldError, LightfieldImage, RefocusShift, require_valid


class InterpMode(str, Enum):
    NEAREST = "nn"
    LINEAR = "linear"


class PrecisionMode(str, Enum):
    EXACT = "exact"
    HARDWARE = "hw"
    SUM_ONLY = "sum-only"


class Refocused(NamedTuple):
    values: np.ndarray
    valid: np.ndarray


class RefocusResult(NamedTuple):
    """2-D output: planar ``(C, L, K)`` uint8 pixels and an ``(L, K)`` mask."""

    pixels: np.ndarray
    valid: np.ndarray


def round_half_up(num, den):
    """``floor(num / den + 1/2)`` for non-negative integer numerators."""
    return (2 * np.asarray(num, dtype=np.int64) + den) // (2 * den)


def phase_offset(shift: RefocusShift) -> int:
    """Upsampled-grid offset that gives every output a group delay of ``c``.

    With ``g = gcd(a', M)`` the taps of a fully formed output average to
    ``k - c`` exactly when the offset is ``a'c - 2c + (M - g) / 2``.
    """
    M, a, c = shift.M, shift.numerator, shift.center
    g = gcd(a, M)
    return a * c - 2 * c + (M - g) // 2


def interp_scale(M: int, mode: InterpMode) -> int:
    """Integer weight scale of one view sample: 1 for NN, ``M`` for linear."""
    return 1 if InterpMode(mode) is InterpMode.NEAREST else M


def view_positions(k, shift: RefocusShift) -> np.ndarray:
    """Upsampled-grid positions read by output ``k``, one per view."""
    v = np.arange(shift.M)
    return np.asarray(k)[..., None] - shift.numerator * v + phase_offset(shift)


def taps(k: int, shift: RefocusShift, mode: InterpMode = InterpMode.NEAREST) -> dict[int, int]:
    """Raw-row positions and integer weights summed into output ``k``.

    The output equals ``sum(w * row[p]) / (M * interp_scale)``.  Positions may
    fall outside the row; such outputs are invalid.
    """
    M, c = shift.M, shift.center
    out: dict[int, int] = {}
    for v, q in enumerate(view_positions(k, shift).tolist()):
        if InterpMode(mode) is InterpMode.NEAREST:
            out[M * (q // M) + v] = 1
        else:
            f = (q - c) % M
            j0 = (q - c - f) // M
            out[M * j0 + v] = M - f
            if f:
                out[M * (j0 + 1) + v] = f
    return out


def stored_product_lut(M: int, prec: PrecisionMode = PrecisionMode.HARDWARE,
                       weight: int = 1, scale: int = 1) -> np.ndarray:
    """256-entry quotient table ``round_half_up(weight * v / (M * scale))``.

    Exact mode never quantizes per tap and gets the plain product instead.
    """
    if M < 1:
        raise LightfieldError(f"divisor must be positive, got {M}")
    v = np.arange(256, dtype=np.int64)
    if PrecisionMode(prec) is PrecisionMode.HARDWARE:
        return round_half_up(weight * v, M * scale)
    return weight * v


def _check_row_length(K: int, M: int) -> None:
    if K % M:
        raise LightfieldError(f"row length {K} is not divisible by micro size {M}")


def _view_planes(rows: np.ndarray, M: int, mode: InterpMode, product):
    """Upsample every view of ``rows`` (..., K) onto the K-sample grid.

    Returns integer contributions ``(..., M, K)`` already scaled by the
    interpolation weights (via ``product(weight, sample)``) and an ``(M, K)``
    support mask that is False where linear interpolation would need a
    neighbour beyond the row (those samples are edge-replicated).
    """
    K = rows.shape[-1]
    J = K // M
    c = (M - 1) // 2
    q = np.arange(K)
    v = np.arange(M)[:, None]
    if InterpMode(mode) is InterpMode.NEAREST:
        pos = M * (q // M)[None, :] + v
        planes = product(np.ones_like(pos), rows[..., pos])
        return planes, np.ones((M, K), dtype=bool)
    f = (q - c) % M
    j0 = (q - c - f) // M
    support = (j0 >= 0) & ((f == 0) | (j0 + 1 < J))
    lo = M * np.clip(j0, 0, J - 1)[None, :] + v
    hi = M * np.clip(j0 + 1, 0, J - 1)[None, :] + v
    w_lo = np.broadcast_to(M - f, lo.shape)
    w_hi = np.broadcast_to(f, hi.shape)
    planes = product(w_lo, rows[..., lo]) + product(w_hi, rows[..., hi])
    return planes, np.broadcast_to(support, (M, K))


def upsample_row(row, M: int, mode: InterpMode = InterpMode.NEAREST) -> np.ndarray:
    """Per-view upsampling of a raw row: returns an ``(M, K)`` float array.

    Plane ``v`` holds view ``v`` of every micro image resampled onto the
    sensor grid.  NN repeats each micro image ``M`` times; linear interpolates
    between the same view of neighbouring micro images, with the first and
    last micro image replicated at the row ends.
    """
    arr = np.asarray(row, dtype=np.int64)
    _check_row_length(arr.shape[-1], M)
    planes, _ = _view_planes(arr, M, mode, lambda w, x: w * x)
    return planes / interp_scale(M, mode)


def _shift_and_sum(planes: np.ndarray, support: np.ndarray, shift: RefocusShift):
    """Sum views read at :func:`view_positions`; zero-fill and mask outside."""
    K = planes.shape[-1]
    k = np.arange(K)
    pos = view_positions(k, shift)  # (K, M)
    inside = (pos >= 0) & (pos < K)
    clipped = np.clip(pos, 0, K - 1)
    views = np.arange(shift.M)[None, :]
    vals = planes[..., views, clipped]  # (..., K, M)
    vals = np.where(inside, vals, 0)
    ok = inside & support[views, clipped]
    return vals.sum(axis=-1), ok.all(axis=-1)


def _product_for(prec: PrecisionMode, M: int, scale: int):
    if PrecisionMode(prec) is PrecisionMode.HARDWARE:
        table = np.stack([stored_product_lut(M, prec, w, scale) for w in range(scale + 1)])
        return lambda w, x: table[w, x]
    return lambda w, x: w * x


def refocus_sums(rows, shift: RefocusShift, mode: InterpMode = InterpMode.NEAREST,
                 prec: PrecisionMode = PrecisionMode.EXACT) -> Refocused:
    """Undivided refocus along the last axis.

    Exact and sum-only modes return the wide weighted sum (denominator
    ``M * interp_scale``); hardware mode returns the sum of stored products.
    """
    arr = np.asarray(rows, dtype=np.int64)
    M = shift.M
    _check_row_length(arr.shape[-1], M)
    prec = PrecisionMode(prec)
    if prec is PrecisionMode.HARDWARE and arr.size and (arr.min() < 0 or arr.max() > 255):
        raise LightfieldError("hardware mode needs 8-bit input samples")
    planes, support = _view_planes(arr, M, mode, _product_for(prec, M, interp_scale(M, mode)))
    return Refocused(*_shift_and_sum(planes, support, shift))


def finish(sums: np.ndarray, M: int, mode: InterpMode, prec: PrecisionMode) -> np.ndarray:
    """Turn undivided sums into output samples for the given precision."""
    prec = PrecisionMode(prec)
    scale = interp_scale(M, mode)
    if prec is PrecisionMode.EXACT:
        return round_half_up(sums, M * scale)
    if prec is PrecisionMode.SUM_ONLY:
        return round_half_up(sums, scale)
    return np.minimum(sums, 255)


def check_sum_only(rows, M: int) -> None:
    arr = np.asarray(rows)
    limit = 255 // M
    if arr.size and arr.max() > limit:
        raise LightfieldError(
            f"sum-only mode requires samples <= floor(255/M) = {limit}, found {arr.max()}"
        )


def refocus_1d(row, shift: RefocusShift, mode: InterpMode = InterpMode.NEAREST,
               prec: PrecisionMode = PrecisionMode.EXACT) -> Refocused:
    """Resolution-preserving refocus of a raw row (or a stack of rows).

    Returns ``(values, valid)``.  Taps outside the row read as zero and the
    affected outputs are marked invalid.
    """
    if PrecisionMode(prec) is PrecisionMode.SUM_ONLY:
        check_sum_only(row, shift.M)
    sums, valid = refocus_sums(row, shift, mode, prec)
    return Refocused(finish(sums, shift.M, mode, prec), valid)


def refocus_2d(img: LightfieldImage, shift: RefocusShift,
               mode: InterpMode = InterpMode.NEAREST,
               prec: PrecisionMode = PrecisionMode.EXACT) -> RefocusResult:
    """Rows first, then columns.  Exact mode keeps wide intermediates and
    divides once at the end; hardware mode passes 8-bit samples between stages."""
    require_valid(img)
    if img.micro_size != shift.M:
        raise LightfieldError(f"shift {shift} does not match image micro size {img.micro_size}")
    M = shift.M
    prec = PrecisionMode(prec)
    px = np.asarray(img.pixels, dtype=np.int64)

    if prec is PrecisionMode.EXACT:
        rows, row_ok = refocus_sums(px, shift, mode, prec)
        cols, col_ok = refocus_sums(np.swapaxes(rows, -1, -2), shift, mode, prec)
        denom = (M * interp_scale(M, mode)) ** 2
        out = round_half_up(np.swapaxes(cols, -1, -2), denom)
    else:
        rows, row_ok = refocus_1d(px, shift, mode, prec)
        cols, col_ok = refocus_1d(np.swapaxes(rows, -1, -2), shift, mode, prec)
        out = np.swapaxes(cols, -1, -2)
    valid = row_ok[None, :] & col_ok[:, None]
    return RefocusResult(out.astype(np.uint8), valid)


def integral_projection_1d(row, a: int, M: int) -> Refocused:
    """Resolution-reducing projection: one output per micro image.

    ``out[k] = round(sum_i row[k' + i(aM - 1)] / M)`` with ``k' = (k+1)M - 1``.
    """
    if isinstance(a, bool) or not isinstance(a, (int, np.integer)) or a < 1:
        raise LightfieldError(f"projection shift must be a positive integer, got {a!r}")
    arr = np.asarray(row, dtype=np.int64)
    K = arr.shape[-1]
    _check_row_length(K, M)
    k = np.arange(K // M)
    pos = ((k + 1) * M - 1)[:, None] + np.arange(M)[None, :] * (a * M - 1)
    inside = (pos >= 0) & (pos < K)
    vals = np.where(inside, arr[..., np.clip(pos, 0, K - 1)], 0)
    return Refocused(round_half_up(vals.sum(axis=-1), M), inside.all(axis=-1))
