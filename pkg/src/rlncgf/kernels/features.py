"""CPU capability detection.

The flags mirror the split that matters for the region kernels: whether a
byte-permute (``pshufb``-style) instruction exists at a given width, and
whether 512-bit vectors are limited to the foundation subset, which has a
32-bit integer multiply but no byte shuffle.
"""

from __future__ import annotations

import functools
import platform
from dataclasses import dataclass


@dataclass(frozen=True)
class FeatureSet:
    has_simd128_byte_permute: bool = False
    has_simd256_byte_permute: bool = False
    has_simd512_foundation: bool = False
    has_simd512_byte_and_word: bool = False
    emulated: bool = False
    has_scalar: bool = True

    def __post_init__(self) -> None:
        if self.has_simd512_byte_and_word and not self.has_simd512_foundation:
            raise ValueError("512-bit byte-and-word support implies foundation support")

    @classmethod
    def scalar_only(cls) -> FeatureSet:
        return cls()

    @classmethod
    def everything(cls, emulated: bool = True) -> FeatureSet:
        """All widths, as exposed by the portable numpy emulation."""
        return cls(True, True, True, True, emulated=emulated)

    def byte_permute(self, block_bits: int) -> bool:
        return {
            128: self.has_simd128_byte_permute,
            256: self.has_simd256_byte_permute,
            512: self.has_simd512_byte_and_word,
        }.get(block_bits, False)

    def vector_multiply(self, block_bits: int) -> bool:
        # 128/256-bit mullo_epi32 ships with the same extensions as the byte shuffles
        if block_bits == 64:
            return True
        if block_bits == 512:
            return self.has_simd512_foundation
        return self.byte_permute(block_bits)

    def describe(self) -> str:
        names = [
            name
            for name, on in (
                ("simd128_byte_permute", self.has_simd128_byte_permute),
                ("simd256_byte_permute", self.has_simd256_byte_permute),
                ("simd512_foundation", self.has_simd512_foundation),
                ("simd512_byte_and_word", self.has_simd512_byte_and_word),
            )
            if on
        ]
        tag = " (emulated)" if self.emulated else ""
        return ("scalar " + " ".join(names)).strip() + tag


def features_from_flags(flags: set[str] | frozenset[str], machine: str = "x86_64") -> FeatureSet:
    """Map OS-reported CPU flags to a :class:`FeatureSet`."""
    m = machine.lower()
    if m in ("x86_64", "amd64", "i386", "i686", "x86"):
        f512 = "avx512f" in flags
        return FeatureSet(
            has_simd128_byte_permute="ssse3" in flags,
            has_simd256_byte_permute="avx2" in flags,
            has_simd512_foundation=f512,
            has_simd512_byte_and_word=f512 and "avx512bw" in flags,
        )
    if m in ("aarch64", "arm64") or m.startswith("armv"):
        # NEON tbl is a 128-bit byte permute
        return FeatureSet(has_simd128_byte_permute=bool({"asimd", "neon"} & flags) or m in ("aarch64", "arm64"))
    return FeatureSet.scalar_only()


def _read_cpuinfo_flags(path: str = "/proc/cpuinfo") -> set[str]:
    try:
        with open(path) as fh:
            for line in fh:
                key, _, value = line.partition(":")
                if key.strip() in ("flags", "Features"):
                    return set(value.split())
    except OSError:
        pass
    return set()


@functools.lru_cache(maxsize=1)
def detect_features() -> FeatureSet:
    """Capabilities of the executing CPU, computed once.

    Unknown platforms, or platforms where the flags cannot be read, report
    scalar only.
    """
    machine = platform.machine()
    flags = _read_cpuinfo_flags()
    if not flags and machine.lower() not in ("aarch64", "arm64"):
        return FeatureSet.scalar_only()
    return features_from_flags(flags, machine)
