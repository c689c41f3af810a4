"""Binary extension fields GF(2), GF(4), GF(16) and GF(256).

Elements are integers whose bits are polynomial coefficients over GF(2).
Sub-byte fields pack several words into one byte; word ``i`` occupies
bits ``[i*w, (i+1)*w)`` counting from the least significant bit.

Everything here is deliberately slow and obvious.  :func:`poly_mul` is the
oracle the table builder and the kernel tests are checked against.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class FieldId(enum.Enum):
    GF2 = 2
    GF4 = 4
    GF16 = 16
    GF256 = 256


@dataclass(frozen=True)
class FieldSpec:
    """Static description of one extension field.

    Attributes
    ----------
    field_id : FieldId
    q : int
        Number of elements, ``2**w``.
    w : int
        Word width in bits.
    reduction_poly : int
        Bitmask of the monic degree-``w`` polynomial, leading term included.
    """

    field_id: FieldId
    q: int
    w: int
    reduction_poly: int

    def __post_init__(self) -> None:
        if self.w not in (1, 2, 4, 8):
            raise ValueError(f"unsupported word width {self.w}")
        if self.q != 1 << self.w:
            raise ValueError(f"q={self.q} does not match w={self.w}")
        if self.reduction_poly >> self.w != 1:
            raise ValueError(
                f"reduction polynomial {self.reduction_poly:#x} is not monic of degree {self.w}"
            )

    @property
    def words_per_byte(self) -> int:
        return 8 // self.w

    @property
    def word_mask(self) -> int:
        return self.q - 1

    @property
    def name(self) -> str:
        return f"GF({self.q})"

    def __str__(self) -> str:
        return self.name


GF2 = FieldSpec(FieldId.GF2, 2, 1, 0b11)
GF4 = FieldSpec(FieldId.GF4, 4, 2, 0b111)
GF16 = FieldSpec(FieldId.GF16, 16, 4, 0b10011)
GF256 = FieldSpec(FieldId.GF256, 256, 8, 0x11B)

FIELDS: dict[int, FieldSpec] = {2: GF2, 4: GF4, 16: GF16, 256: GF256}


def field_by_q(q: int) -> FieldSpec:
    try:
        return FIELDS[q]
    except KeyError:
        raise ValueError(f"no supported field with {q} elements; choose from {sorted(FIELDS)}") from None


def _check_word(x: int, spec: FieldSpec) -> None:
    if not 0 <= x < spec.q:
        raise ValueError(f"{x} is not an element of {spec.name}")


def clmul(a: int, b: int) -> int:
    """Carryless product of two bit polynomials."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a: int, poly: int) -> int:
    """Remainder of ``a`` modulo ``poly`` over GF(2)."""
    deg = poly.bit_length() - 1
    while a.bit_length() - 1 >= deg:
        a ^= poly << (a.bit_length() - 1 - deg)
    return a


def poly_mul(a: int, b: int, spec: FieldSpec) -> int:
    """Product of two field elements by shift-add multiplication and reduction."""
    _check_word(a, spec)
    _check_word(b, spec)
    return poly_mod(clmul(a, b), spec.reduction_poly)


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_inv(a: int, spec: FieldSpec) -> int:
    """Multiplicative inverse, found by exhaustive search.

    Raises
    ------
    ZeroDivisionError
        If ``a`` is zero.
    """
    _check_word(a, spec)
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse in {spec.name}")
    for x in range(1, spec.q):
        if poly_mul(a, x, spec) == 1:
            return x
    raise ArithmeticError(f"{a} has no inverse; reduction polynomial is reducible")


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1 .. deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(2, 1 << (deg // 2 + 1)):
        if poly_mod(poly, d) == 0:
            return False
    return True


def poly_mul_words(words: np.ndarray, c: int, spec: FieldSpec) -> np.ndarray:
    """``c * x`` for every word in ``words``, by shift-add over whole arrays.

    Same arithmetic as :func:`poly_mul`, without any lookup table.
    """
    _check_word(c, spec)
    x = np.asarray(words, dtype=np.uint16)
    acc = np.zeros_like(x)
    for k in range(spec.w):
        if (c >> k) & 1:
            acc ^= x << k
    for k in range(2 * spec.w - 2, spec.w - 1, -1):
        hit = (acc >> k) & 1
        acc ^= hit * np.uint16(spec.reduction_poly << (k - spec.w))
    return acc.astype(np.uint8)


def oracle_madd(b: bytes | np.ndarray, a: bytes | np.ndarray, c: int, spec: FieldSpec) -> np.ndarray:
    """Reference ``b + c*a`` over packed bytes, unpacking to words first."""
    wa = unpack_words(a, spec)
    wb = unpack_words(b, spec)
    return np.frombuffer(pack_words(wb ^ poly_mul_words(wa, c, spec), spec), dtype=np.uint8)


def pack_words(words: Sequence[int] | np.ndarray, spec: FieldSpec) -> bytes:
    """Pack field words into bytes, low word in the low bits."""
    arr = np.asarray(words, dtype=np.int64).ravel()
    if arr.size and (arr.min() < 0 or arr.max() >= spec.q):
        raise ValueError(f"word out of range for {spec.name}")
    wpb = spec.words_per_byte
    if arr.size % wpb:
        raise ValueError(f"word count {arr.size} is not a multiple of {wpb}")
    shifts = np.arange(wpb, dtype=np.int64) * spec.w
    packed = np.bitwise_or.reduce(arr.reshape(-1, wpb) << shifts, axis=1) if arr.size else arr
    return packed.astype(np.uint8).tobytes()


def unpack_words(data: bytes | bytearray | np.ndarray, spec: FieldSpec) -> np.ndarray:
    """Inverse of :func:`pack_words`; returns a uint8 array of words."""
    raw = np.frombuffer(bytes(data), dtype=np.uint8) if not isinstance(data, np.ndarray) else data
    shifts = (np.arange(spec.words_per_byte, dtype=np.uint8) * spec.w).astype(np.uint8)
    words = (raw.astype(np.uint8)[:, None] >> shifts) & np.uint8(spec.word_mask)
    return words.reshape(-1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class FieldTables:
    """Precomputed constants for one field.

    ``mul`` is q x q, ``inv`` has q entries (``inv[0] == 0``), ``tl``/``th``
    are q x 16 nibble tables for the shuffle kernels, ``pow`` is q x w with
    ``pow[c][k] == c * (1 << k)`` for the imul kernels, and ``byte_mul`` is
    the q x 256 product of a coefficient with every packed byte.
    """

    spec: FieldSpec
    mul: np.ndarray
    inv: np.ndarray
    tl: np.ndarray
    th: np.ndarray
    pow: np.ndarray
    byte_mul: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.mul, self.inv, self.tl, self.th, self.pow, self.byte_mul):
            arr.flags.writeable = False


def _packed_product(c: int, v: int, spec: FieldSpec, mul: np.ndarray) -> int:
    out = 0
    for i in range(spec.words_per_byte):
        s = i * spec.w
        out |= int(mul[c, (v >> s) & spec.word_mask]) << s
    return out


def build_tables(spec: FieldSpec) -> FieldTables:
    """Build every table for ``spec`` from :func:`poly_mul`.

    Raises ``ValueError`` if the reduction polynomial is reducible.
    """
    if not is_irreducible(spec.reduction_poly):
        raise ValueError(f"reduction polynomial {spec.reduction_poly:#x} is reducible")
    q = spec.q
    mul = np.zeros((q, q), dtype=np.uint8)
    for a in range(q):
        for b in range(a, q):
            mul[a, b] = mul[b, a] = poly_mul(a, b, spec)

    inv = np.zeros(q, dtype=np.uint8)
    for a in range(1, q):
        (hits,) = np.nonzero(mul[a] == 1)
        if hits.size != 1:
            raise ValueError(f"{a} has no unique inverse in {spec.name}")
        inv[a] = hits[0]

    byte_mul = np.array(
        [[_packed_product(c, v, spec, mul) for v in range(256)] for c in range(q)],
        dtype=np.uint8,
    )
    nib = np.arange(16)
    tl = np.ascontiguousarray(byte_mul[:, nib])
    th = np.ascontiguousarray(byte_mul[:, nib << 4])

    pow_ = np.array([[mul[c, 1 << k] for k in range(spec.w)] for c in range(q)], dtype=np.uint8)
    # imul: lane products must not spill past a word; true iff every constant fits in w bits
    assert int(pow_.max(initial=0)) < q

    return FieldTables(spec, mul, inv, tl, th, pow_, byte_mul)


@functools.lru_cache(maxsize=None)
def get_tables(spec: FieldSpec) -> FieldTables:
    """Shared, immutable tables for ``spec`` (built on first use)."""
    return build_tables(spec)


def dump_tables(tables: FieldTables) -> str:
    """Hex text dump, one section per table, for diffing across builds."""
    lines = [f"# {tables.spec.name} poly={tables.spec.reduction_poly:#x}"]
    for name in ("mul", "inv", "tl", "th", "pow"):
        arr = np.atleast_2d(getattr(tables, name))
        lines.append(f"[{name}]")
        lines.extend(row.tobytes().hex() for row in arr)
    return "\n".join(lines) + "\n"

