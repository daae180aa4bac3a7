"""Grayscale PGM I/O, 3x3 convolution with a pluggable multiplier, PSNR.

The convolution models the hardware datapath: pixels are halved to fit a
signed 8-bit operand, each tap goes through the supplied multiplier
(including zero-padding taps, which matters for biased designs), and the
accumulator is doubled back and clamped to the display range.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .multiplier import MultiplierConfig, multiply_batch, preset

__all__ = [
    "GrayImage",
    "PgmError",
    "LAPLACIAN_KERNEL",
    "load_pgm",
    "save_pgm",
    "make_multiplier",
    "convolve3x3",
    "psnr",
    "edge_detect",
]

LAPLACIAN_KERNEL = (-1, -1, -1, -1, 8, -1, -1, -1, -1)
_ROW_BLOCKS = 16  # fixed work split, independent of thread count


class PgmError(ValueError):
    """Malformed or unsupported PGM input."""


@dataclass(frozen=True)
class GrayImage:
    """Row-major 8-bit grayscale raster."""

    width: int
    height: int
    pixels: bytes

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        if len(self.pixels) != self.width * self.height:
            raise ValueError("pixel payload length does not match dimensions")

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(self.height, self.width)


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(data):
        ch = data[pos:pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise PgmError("unterminated comment in header")
            pos = nl + 1
        else:
            break
    if pos >= len(data):
        raise PgmError("truncated file: header incomplete")
    start = pos
    while pos < len(data) and not data[pos:pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def load_pgm(data: bytes) -> GrayImage:
    """Parse binary (P5) or ASCII (P2) PGM with maxval 255."""
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise PgmError("not a PGM file (magic %r)" % magic)
    pos = 2
    header = []
    for field in ("width", "height", "maxval"):
        tok, pos = _next_token(data, pos)
        if not tok.isdigit():
            raise PgmError("non-numeric %s field %r" % (field, tok))
        header.append(int(tok))
    width, height, maxval = header
    if width <= 0 or height <= 0:
        raise PgmError("bad dimensions %dx%d" % (width, height))
    if maxval != 255:
        raise PgmError("unsupported maxval %d (only 255)" % maxval)
    count = width * height
    if magic == b"P5":
        if pos >= len(data) or not data[pos:pos + 1].isspace():
            raise PgmError("missing raster separator")
        pos += 1
        raster = data[pos:pos + count]
        if len(raster) < count:
            raise PgmError("truncated pixel data (%d of %d bytes)" % (len(raster), count))
        return GrayImage(width, height, bytes(raster))
    values = bytearray()
    for _ in range(count):
        tok, pos = _next_token(data, pos)
        if not tok.isdigit():
            raise PgmError("non-numeric pixel %r" % tok)
        v = int(tok)
        if v > 255:
            raise PgmError("pixel value %d exceeds maxval" % v)
        values.append(v)
    return GrayImage(width, height, bytes(values))


def save_pgm(img: GrayImage) -> bytes:
    """Serialize as binary P5 with maxval 255."""
    return b"P5\n%d %d\n255\n" % (img.width, img.height) + img.pixels


def make_multiplier(cfg: MultiplierConfig):
    """Scalar (pixel, coefficient) multiplier backed by per-coefficient tables.

    The halved pixel domain is only 0..127, so each distinct coefficient
    costs one vectored engine run; afterwards every call is a lookup.
    """
    tables: dict[int, np.ndarray] = {}
    domain = np.arange(128, dtype=np.int64)

    def mul(pixel: int, coeff: int) -> int:
        table = tables.get(coeff)
        if table is None:
            table = tables[coeff] = multiply_batch(
                cfg, domain, np.full(128, coeff, dtype=np.int64))
        return int(table[pixel])

    return mul


def _row_blocks(height: int):
    bounds = np.linspace(0, height, _ROW_BLOCKS + 1).astype(np.int64)
    return [(int(bounds[k]), int(bounds[k + 1]))
            for k in range(_ROW_BLOCKS) if bounds[k] < bounds[k + 1]]


def _clamp(acc: int) -> int:
    return 0 if acc < 0 else (255 if acc > 255 else acc)


def convolve3x3(img: GrayImage, kernel, mul, threads: int = 1) -> GrayImage:
    """Zero-padded 3x3 convolution through an arbitrary multiplier function.

    Every tap is routed through mul, padding zeros included, so multiplier
    bias on zero operands shows up exactly as the hardware would produce it.
    """
    kernel = tuple(int(k) for k in kernel)
    if len(kernel) != 9:
        raise ValueError("kernel must have 9 coefficients")
    w, h, px = img.width, img.height, img.pixels

    def block(r0: int, r1: int) -> bytes:
        out = bytearray()
        for y in range(r0, r1):
            for x in range(w):
                acc = 0
                t = 0
                for dy in (-1, 0, 1):
                    yy = y + dy
                    inside_y = 0 <= yy < h
                    for dx in (-1, 0, 1):
                        xx = x + dx
                        p = px[yy * w + xx] if inside_y and 0 <= xx < w else 0
                        acc += mul(p >> 1, kernel[t])
                        t += 1
                out.append(_clamp(acc << 1))
        return bytes(out)

    blocks = _row_blocks(h)
    if threads <= 1:
        parts = [block(r0, r1) for r0, r1 in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = [f.result() for f in [pool.submit(block, r0, r1) for r0, r1 in blocks]]
    return GrayImage(w, h, b"".join(parts))


def psnr(reference: GrayImage, test: GrayImage) -> float:
    """10*log10(255^2 / MSE); infinity for identical images."""
    if (reference.width, reference.height) != (test.width, test.height):
        raise ValueError("image dimensions differ")
    r = reference.to_array().astype(np.int64)
    t = test.to_array().astype(np.int64)
    mse = float(np.mean((r - t) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)


def _lut_convolve(img: GrayImage, kernel, cfg: MultiplierConfig, threads: int) -> GrayImage:
    """Vectored twin of convolve3x3 for table-backed multipliers."""
    w, h = img.width, img.height
    luts = {}
    domain = np.arange(128, dtype=np.int64)
    for coeff in set(kernel):
        luts[coeff] = multiply_batch(cfg, domain, np.full(128, coeff, dtype=np.int64))
    scaled = np.zeros((h + 2, w + 2), dtype=np.int64)
    scaled[1:-1, 1:-1] = img.to_array() >> 1

    def block(r0: int, r1: int) -> bytes:
        acc = np.zeros((r1 - r0, w), dtype=np.int64)
        t = 0
        for dy in range(3):
            for dx in range(3):
                patch = scaled[r0 + dy:r1 + dy, dx:dx + w]
                acc += luts[kernel[t]][patch]
                t += 1
        acc <<= 1
        return np.clip(acc, 0, 255).astype(np.uint8).tobytes()

    blocks = _row_blocks(h)
    if threads <= 1:
        parts = [block(r0, r1) for r0, r1 in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = [f.result() for f in [pool.submit(block, r0, r1) for r0, r1 in blocks]]
    return GrayImage(w, h, b"".join(parts))


def edge_detect(img: GrayImage, cfg: MultiplierConfig, threads: int = 1):
    """Laplacian edge map under cfg plus its PSNR against the exact map."""
    edges = _lut_convolve(img, LAPLACIAN_KERNEL, cfg, threads)
    reference = _lut_convolve(img, LAPLACIAN_KERNEL, preset("exact", cfg.width), threads)
    return edges, psnr(reference, edges)
