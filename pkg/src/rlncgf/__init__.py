"""Finite-field region arithmetic for random linear network coding."""

from .fields import (
    FIELDS,
    GF2,
    GF4,
    GF16,
    GF256,
    FieldSpec,
    FieldTables,
    build_tables,
    field_by_q,
    get_tables,
    gf_add,
    gf_inv,
    pack_words,
    poly_mul,
    unpack_words,
)
from .kernels import (
    KernelId,
    alloc_region,
    available_kernels,
    detect_features,
    madd_region,
    mul_region,
    select_kernel,
    xor_region,
)
from .rlnc import CodedPacket, CodingVector, Generation, decode, encode, random_vector, rank

__version__ = "0.1.0"
