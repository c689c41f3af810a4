"""Generation-based linear network coding.

A coded packet is ``b = sum(c_i * a_i)`` over the N source packets of a
generation, built by N multiply-and-add passes into a zeroed accumulator.
The decoder runs Gauss-Jordan elimination on ``[coefficients | payload]``
rows, with payload row operations going through the region kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fields import FieldSpec, get_tables
from .kernels import (
    KernelId,
    alloc_region,
    check_region,
    madd_region,
    mul_region,
    region_from,
    select_kernel,
)


class DimensionError(ValueError):
    pass


@dataclass
class Generation:
    spec: FieldSpec
    packets: list[np.ndarray]

    def __post_init__(self) -> None:
        if not self.packets:
            raise DimensionError("a generation needs at least one packet")
        sizes = {p.size for p in self.packets}
        if len(sizes) != 1:
            raise DimensionError(f"packets differ in length: {sorted(sizes)}")
        for p in self.packets:
            check_region(p, "packet")

    @property
    def size(self) -> int:
        """Generation size N."""
        return len(self.packets)

    @property
    def packet_bytes(self) -> int:
        return self.packets[0].size

    @classmethod
    def from_bytes(cls, spec: FieldSpec, chunks: Sequence[bytes]) -> Generation:
        return cls(spec, [region_from(c) for c in chunks])

    @classmethod
    def random(cls, spec: FieldSpec, n: int, packet_bytes: int, seed: int | None = None) -> Generation:
        rng = np.random.default_rng(seed)
        packets = []
        for _ in range(n):
            r = alloc_region(packet_bytes)
            r[:] = rng.integers(0, 256, size=r.size, dtype=np.uint8)
            packets.append(r)
        return cls(spec, packets)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Generation):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.size == other.size
            and all(np.array_equal(x, y) for x, y in zip(self.packets, other.packets))
        )


@dataclass(frozen=True, eq=False)
class CodingVector:
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.coefficients, dtype=np.uint8).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "coefficients", arr)

    def __len__(self) -> int:
        return self.coefficients.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CodingVector):
            return NotImplemented
        return np.array_equal(self.coefficients, other.coefficients)

    def __add__(self, other: CodingVector) -> CodingVector:
        return CodingVector(self.coefficients ^ other.coefficients)

    @classmethod
    def unit(cls, n: int, k: int) -> CodingVector:
        v = np.zeros(n, dtype=np.uint8)
        v[k] = 1
        return cls(v)


@dataclass(frozen=True)
class CodedPacket:
    vector: CodingVector
    payload: np.ndarray = field(repr=False)


def random_coefficients(shape: int | tuple[int, ...], spec: FieldSpec, seed) -> np.ndarray:
    """Uniform field elements from PCG64 64-bit outputs masked to ``q - 1``.

    Masking is exact because ``q`` divides ``2**64``.  ``seed`` may be an int
    or an existing ``numpy.random.Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(np.random.PCG64(seed))
    raw = rng.integers(0, 2**64, size=shape, dtype=np.uint64, endpoint=False)
    return (raw & np.uint64(spec.q - 1)).astype(np.uint8)


def random_vector(n: int, spec: FieldSpec, seed) -> CodingVector:
    return CodingVector(random_coefficients(n, spec, seed))


def _resolve(kernel: KernelId | str | None, spec: FieldSpec) -> KernelId:
    if isinstance(kernel, KernelId):
        return kernel
    return select_kernel(spec, preference=kernel)


def encode(gen: Generation, c: CodingVector, kernel: KernelId | str | None = None) -> CodedPacket:
    """Coded packet ``sum(c_i * a_i)`` over the generation."""
    if len(c) != gen.size:
        raise DimensionError(f"coding vector has {len(c)} entries, generation has {gen.size}")
    if c.coefficients.size and int(c.coefficients.max()) >= gen.spec.q:
        raise ValueError(f"coefficient out of range for {gen.spec}")
    kid = _resolve(kernel, gen.spec)
    tables = get_tables(gen.spec)
    acc = alloc_region(gen.packet_bytes)
    for ci, a in zip(c.coefficients.tolist(), gen.packets):
        madd_region(kid, gen.spec, tables, acc, a, ci)
    return CodedPacket(c, acc)


@dataclass
class DecodeResult:
    rank: int
    generation: Generation | None

    @property
    def complete(self) -> bool:
        return self.generation is not None


def _reduce(coeffs: np.ndarray, spec: FieldSpec, payloads: list[np.ndarray] | None = None, kernel=None) -> int:
    """In-place Gauss-Jordan elimination; returns the rank.

    ``coeffs`` holds one coefficient per byte.  Pivot rows are normalised so
    that, at full rank, the first N rows end up as the identity.
    """
    tables = get_tables(spec)
    mul, inv = tables.mul, tables.inv
    rows, cols = coeffs.shape
    r = 0
    for col in range(cols):
        if r == rows:
            break
        (nz,) = np.nonzero(coeffs[r:, col])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            coeffs[[r, p]] = coeffs[[p, r]]
            if payloads is not None:
                payloads[r], payloads[p] = payloads[p], payloads[r]
        pinv = int(inv[coeffs[r, col]])
        coeffs[r] = mul[pinv][coeffs[r]]
        if payloads is not None:
            mul_region(kernel, spec, tables, payloads[r], pinv)
        for i in range(rows):
            f = int(coeffs[i, col])
            if i == r or f == 0:
                continue
            coeffs[i] ^= mul[f][coeffs[r]]
            if payloads is not None:
                madd_region(kernel, spec, tables, payloads[i], payloads[r], f)
        r += 1
    return r


def rank(vectors: Sequence[CodingVector], spec: FieldSpec) -> int:
    """Rank over the field of the matrix whose rows are ``vectors``."""
    if not vectors:
        return 0
    lengths = {len(v) for v in vectors}
    if len(lengths) != 1:
        raise DimensionError(f"vectors differ in length: {sorted(lengths)}")
    m = np.stack([v.coefficients for v in vectors]).astype(np.uint8)
    return _reduce(m, spec)


def decode(
    coded: Sequence[CodedPacket], spec: FieldSpec, kernel: KernelId | str | None = None
) -> DecodeResult:
    """Recover the source generation from coded packets.

    Returns a :class:`DecodeResult` carrying the achieved rank; its
    ``generation`` is ``None`` when the coefficient matrix is rank deficient.
    Inputs are not modified.
    """
    if not coded:
        raise DimensionError("need at least one coded packet")
    n = {len(p.vector) for p in coded}
    sizes = {p.payload.size for p in coded}
    if len(n) != 1 or len(sizes) != 1:
        raise DimensionError("coded packets disagree on generation size or packet length")
    (n,) = n
    kid = _resolve(kernel, spec)
    coeffs = np.stack([p.vector.coefficients for p in coded]).astype(np.uint8)
    payloads = [region_from(p.payload) for p in coded]
    r = _reduce(coeffs, spec, payloads, kid)
    if r < n:
        return DecodeResult(r, None)
    return DecodeResult(r, Generation(spec, payloads[:n]))
