"""Binary PGM/PPM (P5/P6, maxval 255) reading and writing plus JSON sidecars.

Sidecar keys: ``M``, ``lens_grid`` (``grid`` is accepted as an alias) as
``[J_x, J_y]``, ``channels``, ``convention`` (``centered``/``zero_based``) and
an optional free-text ``source``.  Files written here use the canonical header
``P5\\n<K> <L>\\n255\\n`` so that write -> read -> write is byte-identical.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .core import Convention, LightfieldError, LightfieldImage, require_valid

_MAGIC = {b"P5": 1, b"P6": 3}


def _header_tokens(data: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments.

    Returns the tokens and the offset of the single whitespace byte that ends
    the header.
    """
    tokens, pos, n = [], 0, len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise LightfieldError("malformed netpbm header: unexpected end of file")
        tokens.append(data[start:pos])
    if pos >= n or not data[pos:pos + 1].isspace():
        raise LightfieldError("malformed netpbm header: missing whitespace before raster")
    return tokens, pos + 1


def decode_netpbm(data: bytes) -> np.ndarray:
    """Decode P5/P6 bytes into a ``(L, K, C)`` uint8 array."""
    if data[:2] not in _MAGIC:
        raise LightfieldError(f"malformed netpbm header: unsupported magic {data[:2]!r}")
    channels = _MAGIC[data[:2]]
    tokens, offset = _header_tokens(data[2:], 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise LightfieldError(f"malformed netpbm header: non-integer field in {tokens!r}") from None
    if maxval != 255:
        raise LightfieldError(f"unsupported bit depth: maxval {maxval}, only 255 is supported")
    if width <= 0 or height <= 0:
        raise LightfieldError(f"zero-size image {width}x{height}")
    raster = data[2 + offset:]
    expected = width * height * channels
    if len(raster) != expected:
        raise LightfieldError(f"raster holds {len(raster)} bytes, header implies {expected}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, channels)


def encode_netpbm(pixels: np.ndarray) -> bytes:
    """Encode ``(L, K)``, ``(L, K, 1)`` or ``(L, K, 3)`` 8-bit samples."""
    arr = np.asarray(pixels)
    if arr.ndim == 2:
        arr = arr[..., None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise LightfieldError(f"cannot encode array of shape {arr.shape} as PGM/PPM")
    height, width, channels = arr.shape
    if width == 0 or height == 0:
        raise LightfieldError("zero-size image")
    if arr.min() < 0 or arr.max() > 255:
        raise LightfieldError("samples outside [0, 255]")
    magic = b"P5" if channels == 1 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (width, height)
    return header + np.ascontiguousarray(arr, dtype=np.uint8).tobytes()


def read_meta(meta_path) -> dict:
    try:
        meta = json.loads(Path(meta_path).read_text())
    except json.JSONDecodeError as exc:
        raise LightfieldError(f"sidecar {meta_path} is not valid JSON: {exc}") from None
    if not isinstance(meta, dict) or "M" not in meta:
        raise LightfieldError(f"sidecar {meta_path} lacks the micro size 'M'")
    if "lens_grid" not in meta and "grid" in meta:
        meta["lens_grid"] = meta.pop("grid")
    return meta


def read_image(path, meta_path=None) -> LightfieldImage:
    """Read a lightfield and its sidecar (default: ``<path>`` with ``.json`` suffix)."""
    meta_path = Path(meta_path) if meta_path is not None else Path(path).with_suffix(".json")
    pixels = decode_netpbm(Path(path).read_bytes())
    meta = read_meta(meta_path)
    M = meta["M"]
    if not isinstance(M, int):
        raise LightfieldError(f"micro size must be an integer, got {M!r}")
    height, width, channels = pixels.shape
    if "channels" in meta and meta["channels"] != channels:
        raise LightfieldError(f"sidecar says {meta['channels']} channels, image has {channels}")
    grid = meta.get("lens_grid")
    if grid is None:
        grid = (width // M, height // M)
    if len(grid) != 2:
        raise LightfieldError(f"lens grid must be [J_x, J_y], got {grid!r}")
    if grid[0] * M != width or grid[1] * M != height:
        raise LightfieldError(
            f"lens grid {grid[0]}x{grid[1]} with M={M} does not match image {width}x{height}"
        )
    img = LightfieldImage(
        np.moveaxis(pixels, -1, 0),
        M,
        (int(grid[0]), int(grid[1])),
        Convention(meta.get("convention", Convention.CENTERED.value)),
        meta.get("source"),
    )
    require_valid(img)
    return img


def meta_for(img: LightfieldImage) -> dict:
    meta = {
        "M": int(img.micro_size),
        "lens_grid": [int(g) for g in img.lens_grid],
        "channels": img.channels,
        "convention": Convention(img.convention).value,
    }
    if img.source:
        meta["source"] = img.source
    return meta


def mask_path_for(path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".mask.pgm")


def write_image(img, path, mask=None, meta_path=None) -> None:
    """Write a lightfield (or a plain ``(C, L, K)`` array) as P5/P6.

    With ``mask`` given, pixels where it is false are written as 0 and the mask
    itself goes to ``<stem>.mask.pgm`` (255 valid, 0 invalid).  ``meta_path``
    additionally writes the JSON sidecar of a :class:`LightfieldImage`.
    """
    planar = np.asarray(img.pixels if isinstance(img, LightfieldImage) else img)
    if planar.ndim == 2:
        planar = planar[None]
    if planar.size == 0:
        raise LightfieldError("zero-size image")
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != planar.shape[1:]:
            raise LightfieldError(f"mask shape {mask.shape} does not match image {planar.shape[1:]}")
        planar = np.where(mask[None], planar, 0)
    data = encode_netpbm(np.moveaxis(planar, 0, -1))
    _write_bytes(path, data)
    if mask is not None:
        _write_bytes(mask_path_for(path), encode_netpbm(mask.astype(np.uint8) * 255))
    if meta_path is not None:
        if not isinstance(img, LightfieldImage):
            raise LightfieldError("a sidecar needs a LightfieldImage")
        Path(meta_path).write_text(json.dumps(meta_for(img), indent=2) + "\n")


def _write_bytes(path, data: bytes) -> None:
    try:
        with open(os.fspath(path), "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise LightfieldError(f"cannot write {path}: {exc.strerror}") from None
