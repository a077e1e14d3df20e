"""Synthetic lightfields with known focal planes, and a sharpness metric.

A scene is a base texture ``B`` at lens resolution, nearest-neighbour
upsampled to ``Bup``.  Lens ``j`` of a plane with disparity ``d`` (in
upsampled-grid units) records view ``v`` as ``Bup[j*M + c + d*(v - c)]`` on
both axes.  When ``d`` is a multiple of ``M``, refocusing at ``a' = d`` with
NN interpolation collapses every view onto the same texture sample, so the
base texture comes back exactly (see :func:`focused_reference`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LightfieldError, LightfieldImage, RefocusShift
from .oracle import phase_offset

TEXTURES = ("checkerboard", "gradient", "random")


@dataclass(frozen=True)
class SyntheticSpec:
    """Scene description.

    ``disparities`` lists one upsampled-grid shift per depth plane; planes
    occupy equal vertical bands of lenses, left to right.  ``lens_grid`` is
    ``(J_x, J_y)``.
    """

    texture: str = "random"
    seed: int = 0
    disparities: tuple[int, ...] = (0,)
    M: int = 3
    lens_grid: tuple[int, int] = (16, 16)
    channels: int = 1
    max_value: int = 255
    check_period: int = 2

    def __post_init__(self):
        object.__setattr__(self, "disparities", tuple(int(d) for d in self.disparities))
        object.__setattr__(self, "lens_grid", tuple(int(g) for g in self.lens_grid))
        if self.texture not in TEXTURES:
            raise LightfieldError(f"texture must be one of {TEXTURES}, got {self.texture!r}")
        RefocusShift(0, self.M)  # validates M
        if not self.disparities:
            raise LightfieldError("at least one depth plane is required")
        jx, jy = self.lens_grid
        if jx < 1 or jy < 1:
            raise LightfieldError(f"lens grid must be positive, got {self.lens_grid}")
        if len(self.disparities) > jx:
            raise LightfieldError("more depth planes than lens columns")
        if self.channels not in (1, 3):
            raise LightfieldError("channels must be 1 or 3")
        if not 1 <= self.max_value <= 255:
            raise LightfieldError("max_value must lie in [1, 255]")
        c = (self.M - 1) // 2
        for d in self.disparities:
            if d < 0:
                raise LightfieldError(f"disparity {d} is negative; only a' >= 0 is refocusable")
            if d * c >= min(jx, jy) * self.M:
                raise LightfieldError(f"disparity {d} moves views outside a {jx}x{jy}-lens frame")

    @property
    def pad(self) -> int:
        """Lens margin around the frame so every view has texture to sample."""
        c = (self.M - 1) // 2
        return -(-max(self.disparities) * c // self.M) + 1


def base_texture(spec: SyntheticSpec, plane: int = 0) -> np.ndarray:
    """Padded texture ``(C, J_y + 2 pad, J_x + 2 pad)`` at lens resolution."""
    jx, jy = spec.lens_grid
    h, w = jy + 2 * spec.pad, jx + 2 * spec.pad
    top = spec.max_value
    if spec.texture == "random":
        rng = np.random.default_rng([spec.seed, plane])
        return rng.integers(0, top + 1, size=(spec.channels, h, w))
    yy, xx = np.mgrid[0:h, 0:w]
    if spec.texture == "checkerboard":
        t = ((yy // spec.check_period + xx // spec.check_period + plane) % 2) * top
    else:
        t = (xx + yy) * top // max(h + w - 2, 1)
        if plane % 2:
            t = top - t
    return np.broadcast_to(t, (spec.channels, h, w)).copy()


def _plane_of_lens_column(spec: SyntheticSpec) -> np.ndarray:
    jx = spec.lens_grid[0]
    P = len(spec.disparities)
    return np.arange(jx) * P // jx


def _sample_axis(j: np.ndarray, v: np.ndarray, d: int, M: int, pad: int) -> np.ndarray:
    """Upsampled-texture index (in the padded frame) seen by view ``v`` of lens ``j``."""
    c = (M - 1) // 2
    return (j + pad) * M + c + d * (v - c)


def gen_synthetic(spec: SyntheticSpec) -> LightfieldImage:
    M = spec.M
    jx, jy = spec.lens_grid
    K, L = jx * M, jy * M
    jk, vk = np.divmod(np.arange(K), M)
    jl, vl = np.divmod(np.arange(L), M)
    plane_cols = _plane_of_lens_column(spec)[jk]
    out = np.zeros((spec.channels, L, K), dtype=np.int64)
    for p, d in enumerate(spec.disparities):
        B = base_texture(spec, p)
        bup = np.repeat(np.repeat(B, M, axis=1), M, axis=2)
        rows = _sample_axis(jl, vl, d, M, spec.pad)
        cols = _sample_axis(jk, vk, d, M, spec.pad)
        plane = bup[:, rows[:, None], cols[None, :]]
        sel = plane_cols == p
        out[:, :, sel] = plane[:, :, sel]
    return LightfieldImage(out, M, (jx, jy), source=f"synthetic {spec.texture} seed={spec.seed}")


def focused_reference(spec: SyntheticSpec, plane: int = 0) -> np.ndarray:
    """What NN refocusing at ``a' = disparity`` yields for ``plane``.

    Exact when the plane's disparity is a multiple of ``M``; shape ``(C, L, K)``.
    Positions whose texture index leaves the padded frame are clamped and lie
    outside the valid region anyway.
    """
    M = spec.M
    d = spec.disparities[plane]
    shift = RefocusShift(d, M)
    phi = phase_offset(shift)
    c = (M - 1) // 2
    jx, jy = spec.lens_grid
    B = base_texture(spec, plane)
    h, w = B.shape[1:]

    def idx(n, size):
        lens = (np.arange(n) + phi) // M + spec.pad - (d // M) * c
        return np.clip(lens, 0, size - 1)

    return B[:, idx(jy * M, h)[:, None], idx(jx * M, w)[None, :]]


def sharpness(image, valid=None) -> float:
    """Variance of the 4-neighbour Laplacian over pixels whose neighbourhood is valid."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 3:
        img = img.mean(axis=0)
    if img.shape[0] < 3 or img.shape[1] < 3:
        return 0.0
    lap = (img[:-2, 1:-1] + img[2:, 1:-1] + img[1:-1, :-2] + img[1:-1, 2:]
           - 4 * img[1:-1, 1:-1])
    if valid is not None:
        v = np.asarray(valid, dtype=bool)
        ok = (v[1:-1, 1:-1] & v[:-2, 1:-1] & v[2:, 1:-1] & v[1:-1, :-2] & v[1:-1, 2:])
        lap = lap[ok]
    if lap.size == 0:
        return 0.0
    return float(lap.var())
