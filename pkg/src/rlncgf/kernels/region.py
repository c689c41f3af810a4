"""Aligned, block-padded byte buffers."""

from __future__ import annotations

import numpy as np

ALIGNMENT = 64
BLOCK = 64


class RegionError(ValueError):
    pass


def padded_length(n: int) -> int:
    return -(-n // BLOCK) * BLOCK


def alloc_region(nbytes: int, fill: int | None = 0) -> np.ndarray:
    """Return a 64-byte aligned uint8 array of ``nbytes`` (padded up to 64).

    ``fill=None`` leaves the contents uninitialised.
    """
    n = padded_length(nbytes)
    raw = np.empty(n + ALIGNMENT, dtype=np.uint8)
    off = (-raw.ctypes.data) % ALIGNMENT
    buf = raw[off : off + n]
    if fill is not None:
        buf.fill(fill)
    return buf


def region_from(data: bytes | bytearray | np.ndarray) -> np.ndarray:
    """Copy ``data`` into a fresh region, zero-padding the tail."""
    src = np.frombuffer(bytes(data), dtype=np.uint8) if not isinstance(data, np.ndarray) else data
    buf = alloc_region(src.size)
    buf[: src.size] = src
    return buf


def check_region(r: np.ndarray, name: str = "region") -> None:
    if not isinstance(r, np.ndarray) or r.dtype != np.uint8 or r.ndim != 1:
        raise RegionError(f"{name} must be a 1-D uint8 array")
    if not r.flags.c_contiguous:
        raise RegionError(f"{name} is not contiguous")
    if r.ctypes.data % ALIGNMENT:
        raise RegionError(f"{name} is not {ALIGNMENT}-byte aligned")
    if r.size % BLOCK:
        raise RegionError(f"{name} length {r.size} is not a multiple of {BLOCK}")


def check_pair(b: np.ndarray, a: np.ndarray) -> None:
    check_region(b, "destination")
    check_region(a, "source")
    if a.size != b.size:
        raise RegionError(f"length mismatch: {b.size} != {a.size}")
    if np.shares_memory(a, b):
        raise RegionError("source and destination overlap")
