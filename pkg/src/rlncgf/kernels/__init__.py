"""Region multiply-and-add kernels and runtime selection.

``madd_region`` computes ``b := b + c*a`` and ``mul_region`` computes
``b := c*b`` over packed field words.  Four kernel families are available:

- ``scalar``: one lookup per byte in a Python loop; always available.
- ``xor``: GF(2) only, where multiply-and-add degenerates to XOR.
- ``imul``: bit-plane isolation plus packed integer multiplication.
- ``shuffle``: low/high nibble lookups through per-lane byte permutes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..fields import FieldSpec, FieldTables, GF2, get_tables
from . import impl
from .features import FeatureSet, detect_features, features_from_flags
from .region import (
    ALIGNMENT,
    BLOCK,
    RegionError,
    alloc_region,
    check_pair,
    check_region,
    padded_length,
    region_from,
)

__all__ = [
    "ALIGNMENT",
    "BLOCK",
    "Algorithm",
    "CapabilityError",
    "FeatureSet",
    "KernelId",
    "RegionError",
    "alloc_region",
    "available_kernels",
    "detect_features",
    "features_from_flags",
    "get_madd",
    "madd_region",
    "mul_region",
    "padded_length",
    "region_from",
    "select_kernel",
    "supports",
    "xor_region",
]


class CapabilityError(RuntimeError):
    """Requested kernel cannot run on this CPU or field."""


class Algorithm(str, enum.Enum):
    XOR = "xor"
    SCALAR = "scalar"
    IMUL = "imul"
    SHUFFLE = "shuffle"


WIDTHS = (64, 128, 256, 512)


@dataclass(frozen=True, order=True)
class KernelId:
    algorithm: Algorithm
    block_bits: int = 64

    def __post_init__(self) -> None:
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if self.block_bits not in WIDTHS:
            raise ValueError(f"block width must be one of {WIDTHS}")
        if self.algorithm is Algorithm.SHUFFLE and self.block_bits < 128:
            raise ValueError("shuffle needs at least 128-bit blocks")
        if self.algorithm is Algorithm.SCALAR and self.block_bits != 64:
            raise ValueError("scalar kernel has no vector width")

    @property
    def name(self) -> str:
        if self.algorithm is Algorithm.SCALAR:
            return "scalar"
        return f"{self.algorithm.value}{self.block_bits}"

    def __str__(self) -> str:
        return self.name

    @classmethod
    def parse(cls, name: str) -> KernelId:
        """Inverse of :attr:`name`, e.g. ``"shuffle512"`` or ``"scalar"``."""
        name = name.strip().lower()
        for alg in Algorithm:
            if name.startswith(alg.value):
                rest = name[len(alg.value) :]
                if alg is Algorithm.SCALAR and rest == "":
                    return cls(alg, 64)
                if rest.isdigit():
                    return cls(alg, int(rest))
        raise ValueError(f"unknown kernel name {name!r}")


SCALAR = KernelId(Algorithm.SCALAR, 64)


def _width_ok(features: FeatureSet, bits: int) -> bool:
    if bits == 64:
        return True
    if bits == 512:
        return features.has_simd512_foundation
    return features.byte_permute(bits)


def supports(kernel: KernelId, spec: FieldSpec, features: FeatureSet) -> bool:
    alg = kernel.algorithm
    if alg is Algorithm.SCALAR:
        return True
    if alg is Algorithm.XOR:
        return spec == GF2 and _width_ok(features, kernel.block_bits)
    if alg is Algorithm.SHUFFLE:
        return features.byte_permute(kernel.block_bits)
    return features.vector_multiply(kernel.block_bits)


def all_kernels() -> list[KernelId]:
    out = [SCALAR]
    out += [KernelId(Algorithm.XOR, w) for w in WIDTHS]
    out += [KernelId(Algorithm.IMUL, w) for w in WIDTHS]
    out += [KernelId(Algorithm.SHUFFLE, w) for w in WIDTHS[1:]]
    return out


def available_kernels(spec: FieldSpec, features: FeatureSet | None = None) -> list[KernelId]:
    features = detect_features() if features is None else features
    return [k for k in all_kernels() if supports(k, spec, features)]


def select_kernel(
    spec: FieldSpec, features: FeatureSet | None = None, preference: KernelId | str | None = None
) -> KernelId:
    """Pick the kernel to use for ``spec``.

    Without a preference the order is: GF(2) -> widest XOR; otherwise
    shuffle512, then imul512 on foundation-only 512-bit CPUs, then
    shuffle256, shuffle128, and finally the scalar table kernel.
    """
    features = detect_features() if features is None else features
    if preference is not None:
        kid = KernelId.parse(preference) if isinstance(preference, str) else preference
        if not supports(kid, spec, features):
            raise CapabilityError(f"kernel {kid} is not available for {spec} on {features.describe()}")
        return kid
    if spec == GF2:
        return KernelId(Algorithm.XOR, max(w for w in WIDTHS if _width_ok(features, w)))
    if features.has_simd512_byte_and_word:
        return KernelId(Algorithm.SHUFFLE, 512)
    if features.has_simd512_foundation:
        return KernelId(Algorithm.IMUL, 512)
    for bits in (256, 128):
        if features.byte_permute(bits):
            return KernelId(Algorithm.SHUFFLE, bits)
    return SCALAR


MaddFn = Callable[[FieldTables, np.ndarray, np.ndarray, int], None]


def get_madd(kernel: KernelId) -> MaddFn:
    """Unchecked multiply-and-add for the benchmark hot path.

    The caller guarantees valid, non-overlapping, equal-length regions and
    ``c < q``.  Trivial coefficients take the zero/XOR shortcuts.
    """
    body = impl.MADD[kernel.algorithm.value]
    bits = kernel.block_bits
    xor_bits = 64 if kernel.algorithm is Algorithm.SCALAR else bits

    def madd(tables: FieldTables, b: np.ndarray, a: np.ndarray, c: int) -> None:
        if c == 0:
            return
        if c == 1:
            impl.xor_into(b, a, xor_bits)
            return
        body(tables, b, a, c, bits)

    madd.__name__ = f"madd_{kernel.name}"
    return madd


def _check_coeff(c: int, spec: FieldSpec) -> int:
    c = int(c)
    if not 0 <= c < spec.q:
        raise ValueError(f"coefficient {c} is not an element of {spec}")
    return c


def _check_kernel(kernel: KernelId, spec: FieldSpec, c: int) -> None:
    if kernel.algorithm is Algorithm.XOR and c > 1:
        raise CapabilityError(f"xor kernel cannot multiply by {c} in {spec}")


def madd_region(
    kernel: KernelId,
    spec: FieldSpec,
    tables: FieldTables | None,
    b: np.ndarray,
    a: np.ndarray,
    c: int,
) -> None:
    """``b := b + c*a`` word-wise, in place.

    Raises ``RegionError`` for misaligned, unpadded, overlapping or
    mismatched regions and ``ValueError`` for ``c >= q``.
    """
    check_pair(b, a)
    c = _check_coeff(c, spec)
    _check_kernel(kernel, spec, c)
    tables = get_tables(spec) if tables is None else tables
    get_madd(kernel)(tables, b, a, c)


def mul_region(
    kernel: KernelId, spec: FieldSpec, tables: FieldTables | None, b: np.ndarray, c: int
) -> None:
    """``b := c*b`` word-wise, in place."""
    check_region(b, "destination")
    c = _check_coeff(c, spec)
    _check_kernel(kernel, spec, c)
    if c == 1:
        return
    if c == 0:
        b.fill(0)
        return
    tables = get_tables(spec) if tables is None else tables
    b[:] = impl.PRODUCT[kernel.algorithm.value](tables, b, c, kernel.block_bits)


def xor_region(b: np.ndarray, a: np.ndarray) -> None:
    """``b := b XOR a`` byte-wise."""
    check_pair(b, a)
    impl.xor_into(b, a)
