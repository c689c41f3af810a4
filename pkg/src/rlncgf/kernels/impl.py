"""Kernel bodies.

Vector kernels are written against numpy views that stand in for SIMD
registers: a region is reshaped to ``(nblocks, block_bytes)`` and every
instruction of the loop body is applied to all blocks at once.  The
instruction semantics (per-lane byte permute, 64-bit logical shift, 32-bit
``mullo``) are modelled exactly, so the same masks and tables as the
intrinsic versions are needed for a correct result.

The ``_product_*`` functions compute ``c * src`` with no trivial-case
shortcuts; callers layer the ``c in (0, 1)`` early exits on top.
"""

from __future__ import annotations

import numpy as np

from ..fields import FieldTables

LANE_BYTES = 16


def xor_into(b: np.ndarray, a: np.ndarray, block_bits: int = 64) -> None:
    bb = b.view(np.uint64).reshape(-1, block_bits // 64)
    aa = a.view(np.uint64).reshape(-1, block_bits // 64)
    np.bitwise_xor(bb, aa, out=bb)


def _product_scalar(tables: FieldTables, src: np.ndarray, c: int, block_bits: int = 64) -> np.ndarray:
    """One table lookup per byte, in a plain Python loop."""
    row = tables.byte_mul[c].tolist()
    return np.fromiter((row[v] for v in src.tolist()), dtype=np.uint8, count=src.size)


def _madd_scalar(tables: FieldTables, b: np.ndarray, a: np.ndarray, c: int, block_bits: int = 64) -> None:
    row = tables.byte_mul[c].tolist()
    out = bytearray(b.tobytes())
    for i, v in enumerate(a.tobytes()):
        out[i] ^= row[v]
    b[:] = np.frombuffer(out, dtype=np.uint8)


def _lane_offsets(block_bits: int) -> np.ndarray:
    return (np.arange(block_bits // 8, dtype=np.intp) // LANE_BYTES) * LANE_BYTES


_OFFSETS = {bits: _lane_offsets(bits) for bits in (128, 256, 512)}


def shuffle_epi8(reg: np.ndarray, idx: np.ndarray, block_bits: int) -> np.ndarray:
    """Per-128-bit-lane byte permute.

    ``reg`` is one register, shape ``(block_bytes,)``; ``idx`` has shape
    ``(nblocks, block_bytes)``.  Output byte ``j`` is ``reg[lane(j)*16 +
    (idx[j] & 15)]``, or zero when bit 7 of ``idx[j]`` is set.
    """
    flat = _OFFSETS[block_bits] + (idx & 0x0F)
    out = np.take(reg, flat)
    hi = idx >= 0x80
    if hi.any():
        out[hi] = 0
    return out


def broadcast_lane(table16: np.ndarray, block_bits: int) -> np.ndarray:
    return np.tile(table16, block_bits // 128)


def _product_shuffle(tables: FieldTables, src: np.ndarray, c: int, block_bits: int) -> np.ndarray:
    t1 = broadcast_lane(tables.tl[c], block_bits)
    t2 = broadcast_lane(tables.th[c], block_bits)
    blocks = src.reshape(-1, block_bits // 8)
    l = shuffle_epi8(t1, blocks & np.uint8(0x0F), block_bits)
    h = blocks & np.uint8(0xF0)
    h = (h.view(np.uint64) >> np.uint64(4)).view(np.uint8)
    h = shuffle_epi8(t2, h, block_bits)
    return (h ^ l).reshape(-1)


def _madd_shuffle(tables: FieldTables, b: np.ndarray, a: np.ndarray, c: int, block_bits: int) -> None:
    np.bitwise_xor(b, _product_shuffle(tables, a, c, block_bits), out=b)


def bit_masks(w: int) -> list[int]:
    """Byte masks isolating bit ``k`` of every packed ``w``-bit word."""
    return [sum(1 << (k + i * w) for i in range(8 // w)) for k in range(w)]


def _lanes(src: np.ndarray, block_bits: int) -> np.ndarray:
    if block_bits == 64:
        return src.view(np.uint64)
    return src.view(np.uint32).reshape(-1, block_bits // 32)


def _product_imul(tables: FieldTables, src: np.ndarray, c: int, block_bits: int) -> np.ndarray:
    w = tables.spec.w
    reg = _lanes(src, block_bits)
    dt = reg.dtype.type
    reps = reg.dtype.itemsize
    p = tables.pow[c]
    acc = np.zeros_like(reg)
    for k, m in enumerate(bit_masks(w)):
        ri = reg & dt(int.from_bytes(bytes([m]) * reps, "little"))
        if k:
            ri >>= dt(k)
        # multiplier is the bare constant: isolated bits sit w apart, p < 2**w
        ri *= dt(int(p[k]))
        acc ^= ri
    return acc.reshape(-1).view(np.uint8)


def _madd_imul(tables: FieldTables, b: np.ndarray, a: np.ndarray, c: int, block_bits: int) -> None:
    np.bitwise_xor(b, _product_imul(tables, a, c, block_bits), out=b)


def _product_xor(tables: FieldTables, src: np.ndarray, c: int, block_bits: int) -> np.ndarray:
    if c == 0:
        return np.zeros_like(src)
    if c == 1:
        return src.copy()
    raise ValueError(f"xor kernel cannot multiply by {c}")


def _madd_xor(tables: FieldTables, b: np.ndarray, a: np.ndarray, c: int, block_bits: int) -> None:
    if c == 1:
        xor_into(b, a, block_bits)
    elif c != 0:
        raise ValueError(f"xor kernel cannot multiply by {c}")


MADD = {
    "xor": _madd_xor,
    "scalar": _madd_scalar,
    "imul": _madd_imul,
    "shuffle": _madd_shuffle,
}

PRODUCT = {
    "xor": _product_xor,
    "scalar": _product_scalar,
    "imul": _product_imul,
    "shuffle": _product_shuffle,
}
