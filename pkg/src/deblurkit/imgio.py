"""Grayscale image file I/O.

Input: 8/16-bit grayscale PNG (via Pillow) and binary PGM (P5, parsed here
so the maxval scaling rule stays explicit).  Intensities are mapped to
[0, 1] by dividing by the format's max representable value and clamped.
Output: 8-bit grayscale PNG.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

__all__ = ["load_image", "save_png"]


def _read_pgm(data: bytes) -> np.ndarray:
    pos = 0

    def token():
        nonlocal pos
        while pos < len(data):
            c = data[pos : pos + 1]
            if c == b"#":
                nl = data.find(b"\n", pos)
                pos = len(data) if nl < 0 else nl + 1
            elif c.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        return data[start:pos]

    if token() != b"P5":
        raise ValueError("only binary PGM (P5) is supported")
    try:
        width, height, maxval = int(token()), int(token()), int(token())
    except ValueError as e:
        raise ValueError(f"malformed PGM header: {e}") from None
    if width < 1 or height < 1 or not (0 < maxval < 65536):
        raise ValueError(f"invalid PGM dimensions/maxval: {width}x{height}, maxval={maxval}")
    pos += 1  # exactly one whitespace byte separates the header from the raster
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height
    raster = np.frombuffer(data, dtype=dtype, offset=pos, count=-1)
    if raster.size < count:
        raise ValueError("truncated PGM raster")
    return raster[:count].reshape(height, width).astype(np.float64) / maxval


def load_image(path) -> np.ndarray:
    """Load a grayscale image as float64 in [0, 1] (clamped)."""
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        img = _read_pgm(path.read_bytes())
    else:
        with Image.open(path) as im:
            mode = im.mode
            arr = np.asarray(im)
        if mode == "L":
            img = arr.astype(np.float64) / 255.0
        elif mode in ("I", "I;16", "I;16B", "I;16L"):
            img = arr.astype(np.float64) / 65535.0
        else:
            raise ValueError(
                f"{path.name}: unsupported mode {mode!r}; only 8/16-bit grayscale is handled"
            )
    return np.clip(img, 0.0, 1.0)


def save_png(path, x: np.ndarray) -> None:
    """Write a float image as 8-bit grayscale PNG, clipping to [0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {x.shape}")
    u8 = np.round(np.clip(x, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(u8, mode="L").save(Path(path), format="PNG")
