"""Domain types and index algebra for calibrated standard-plenoptic lightfields.

A raw lightfield row of ``K`` pixels is a sequence of micro images of ``M``
samples each.  Pixel ``k`` belongs to micro lens ``j = k // M`` and carries the
angular sample at position ``k % M`` inside that micro image.  Two angular
conventions are in use: *centered* (``i`` in ``[-c, c]`` around the micro image
center ``c = (M - 1) / 2``) and *zero-based* (``i`` in ``[0, M - 1]``), which is
what the filter equations use.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np


class LightfieldError(ValueError):
    """Raised for malformed lightfield geometry or unsupported parameters."""


class Convention(str, Enum):
    CENTERED = "centered"
    ZERO_BASED = "zero-based"


@dataclass(frozen=True)
class RefocusShift:
    """Rational refocus parameter ``a = numerator / micro_size``."""

    numerator: int
    micro_size: int

    def __post_init__(self):
        if isinstance(self.numerator, bool) or not isinstance(self.numerator, (int, np.integer)):
            raise LightfieldError(f"shift numerator must be an integer, got {self.numerator!r}")
        if not isinstance(self.micro_size, (int, np.integer)):
            raise LightfieldError(f"micro size must be an integer, got {self.micro_size!r}")
        if self.micro_size < 3 or self.micro_size % 2 == 0:
            raise LightfieldError(f"micro size must be odd and >= 3, got {self.micro_size}")
        if self.numerator < 0:
            raise LightfieldError(f"negative shifts are not supported (a'={self.numerator})")
        object.__setattr__(self, "numerator", int(self.numerator))
        object.__setattr__(self, "micro_size", int(self.micro_size))

    @classmethod
    def parse(cls, text: str) -> "RefocusShift":
        """Parse ``"a'/M"`` without reducing the fraction (``"3/3"`` stays 3/3)."""
        try:
            num, den = text.strip().split("/")
            return cls(int(num), int(den))
        except ValueError as exc:
            if isinstance(exc, LightfieldError):
                raise
            raise LightfieldError(f"cannot parse shift {text!r}; expected a'/M, e.g. 2/3") from None

    @property
    def M(self) -> int:
        return self.micro_size

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.micro_size)

    @property
    def center(self) -> int:
        return (self.micro_size - 1) // 2

    @property
    def is_integer(self) -> bool:
        return self.numerator % self.micro_size == 0

    def __str__(self) -> str:
        return f"{self.numerator}/{self.micro_size}"


@dataclass(frozen=True)
class MicroCoord:
    """Micro lens index plus angular offset in an explicit convention."""

    lens: int
    offset: int
    micro_size: int
    convention: Convention = Convention.CENTERED

    def __post_init__(self):
        c = (self.micro_size - 1) // 2
        if self.convention is Convention.CENTERED:
            ok = -c <= self.offset <= c
        else:
            ok = 0 <= self.offset < self.micro_size
        if not ok:
            raise LightfieldError(
                f"angular offset {self.offset} out of range for {self.convention.value} "
                f"convention with M={self.micro_size}"
            )

    def to_centered(self) -> "MicroCoord":
        if self.convention is Convention.CENTERED:
            return self
        c = (self.micro_size - 1) // 2
        return MicroCoord(self.lens, self.offset - c, self.micro_size, Convention.CENTERED)

    def to_zero_based(self) -> "MicroCoord":
        if self.convention is Convention.ZERO_BASED:
            return self
        c = (self.micro_size - 1) // 2
        return MicroCoord(self.lens, self.offset + c, self.micro_size, Convention.ZERO_BASED)

    def sensor_index(self) -> int:
        centered = self.to_centered()
        return translate_index(centered.lens, centered.offset, self.micro_size)


def translate_index(j: int, i: int, M: int) -> int:
    """Map lens ``j`` and centered angular offset ``i`` to a sensor column."""
    if M < 1 or M % 2 == 0:
        raise LightfieldError(f"micro size must be odd, got {M}")
    c = (M - 1) // 2
    if abs(i) > c:
        raise LightfieldError(f"|i|={abs(i)} exceeds micro image half-width c={c}")
    return j * M + c + i


def inverse_translate(k: int, M: int) -> tuple[int, int]:
    """Inverse of :func:`translate_index`: returns ``(j, i_centered)``."""
    if k < 0:
        raise LightfieldError(f"sensor index must be non-negative, got {k}")
    j, r = divmod(k, M)
    return j, r - (M - 1) // 2


@dataclass(frozen=True, eq=False)
class LightfieldImage:
    """Calibrated 8-bit lightfield frame.

    ``pixels`` is planar: shape ``(channels, L, K)``.  Construction does not
    validate; call :func:`validate` (readers and processing entry points do).
    """

    pixels: np.ndarray
    micro_size: int
    lens_grid: tuple[int, int]
    convention: Convention = Convention.CENTERED
    source: str | None = None

    @classmethod
    def from_array(cls, array, micro_size: int, lens_grid=None, **kw) -> "LightfieldImage":
        """Build from ``(L, K)``, ``(L, K, C)`` interleaved or ``(C, L, K)`` planar data.

        A 3-D array whose last axis has length 1 or 3 is treated as interleaved.
        """
        arr = np.asarray(array)
        if arr.ndim == 2:
            arr = arr[None]
        elif arr.ndim == 3 and arr.shape[-1] in (1, 3) and arr.shape[0] not in (1, 3):
            arr = np.moveaxis(arr, -1, 0)
        elif arr.ndim != 3:
            raise LightfieldError(f"expected 2-D or 3-D pixel array, got shape {arr.shape}")
        if lens_grid is None:
            lens_grid = (arr.shape[2] // micro_size, arr.shape[1] // micro_size)
        return cls(arr, micro_size, tuple(int(g) for g in lens_grid), **kw)

    @property
    def channels(self) -> int:
        return self.pixels.shape[0]

    @property
    def height(self) -> int:
        return self.pixels.shape[1]

    @property
    def width(self) -> int:
        return self.pixels.shape[2]

    @property
    def bit_depth(self) -> int:
        return 8

    def interleaved(self) -> np.ndarray:
        """Pixels as ``(L, K, C)``, the layout used on disk."""
        return np.moveaxis(self.pixels, 0, -1)


def validate(img: LightfieldImage) -> list[str]:
    """Return every invariant violation of ``img``; empty means valid."""
    problems = []
    M = img.micro_size
    if not isinstance(M, (int, np.integer)) or M < 3 or M % 2 == 0:
        problems.append(f"parity: micro size M={M} must be odd and >= 3")
    px = np.asarray(img.pixels)
    if px.ndim != 3:
        problems.append(f"shape: pixel array must be (channels, L, K), got {px.shape}")
        return problems
    if img.channels not in (1, 3):
        problems.append(f"channels: expected 1 or 3, got {img.channels}")
    jx, jy = img.lens_grid
    if isinstance(M, (int, np.integer)) and M > 0:
        if img.width != jx * M:
            problems.append(f"divisibility: K={img.width} != J_x*M = {jx}*{M}")
        if img.height != jy * M:
            problems.append(f"divisibility: L={img.height} != J_y*M = {jy}*{M}")
    if img.width == 0 or img.height == 0:
        problems.append("size: image has zero width or height")
    if px.size:
        if not np.issubdtype(px.dtype, np.integer):
            if not np.all(px == np.floor(px)):
                problems.append("range: pixel values must be integers")
        lo, hi = px.min(), px.max()
        if lo < 0 or hi > 255:
            problems.append(f"range: pixel values must lie in [0, 255], found [{lo}, {hi}]")
    return problems


def require_valid(img: LightfieldImage) -> None:
    problems = validate(img)
    if problems:
        raise LightfieldError("invalid lightfield: " + "; ".join(problems))
