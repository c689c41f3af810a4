import dataclasses

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rlncgf.fields import (
    FIELDS,
    GF2,
    GF4,
    GF16,
    GF256,
    FieldId,
    FieldSpec,
    build_tables,
    dump_tables,
    field_by_q,
    get_tables,
    gf_add,
    gf_inv,
    is_irreducible,
    oracle_madd,
    pack_words,
    poly_mul,
    poly_mul_words,
    unpack_words,
)

from conftest import poly_mul_lists


def test_field_specs():
    for q, s in FIELDS.items():
        assert s.q == q == 1 << s.w
        assert s.words_per_byte * s.w == 8
        assert s.reduction_poly >> s.w == 1
        assert is_irreducible(s.reduction_poly)
    assert field_by_q(16) is GF16
    with pytest.raises(ValueError):
        field_by_q(8)


def test_spec_rejects_bad_shapes():
    with pytest.raises(ValueError):
        FieldSpec(FieldId.GF4, 8, 2, 0b111)
    with pytest.raises(ValueError):
        FieldSpec(FieldId.GF4, 4, 2, 0b11)


def test_irreducibility():
    assert not is_irreducible(0b101)  # (x+1)^2
    assert not is_irreducible(0x11D ^ 0x1)  # even constant term -> divisible by x
    assert is_irreducible(0x11D)
    assert not is_irreducible(0b10101)  # (x^2+x+1)^2


def test_reducible_polynomial_rejected():
    bad = FieldSpec(FieldId.GF16, 16, 4, 0b10101)
    with pytest.raises(ValueError, match="reducible"):
        build_tables(bad)


def test_poly_mul_examples():
    assert poly_mul(2, 2, GF4) == 3
    assert poly_mul(0x53, 0xCA, GF256) == 0x01
    for s in FIELDS.values():
        for x in range(s.q):
            assert poly_mul(1, x, s) == x


def test_poly_mul_matches_list_oracle(spec):
    for a in range(spec.q):
        for b in range(spec.q):
            assert poly_mul(a, b, spec) == poly_mul_lists(a, b, spec.reduction_poly)


def test_poly_mul_range_check():
    with pytest.raises(ValueError):
        poly_mul(4, 1, GF4)


def test_gf_add():
    assert gf_add(0x9, 0x3) == 0xA
    for a in range(16):
        assert gf_add(a, a) == 0
        assert gf_add(a, 0) == a


def test_gf_inv():
    assert gf_inv(2, GF4) == 3
    assert gf_inv(0x53, GF256) == 0xCA
    for s in FIELDS.values():
        assert gf_inv(1, s) == 1
        with pytest.raises(ZeroDivisionError):
            gf_inv(0, s)


def test_mul_table_equals_oracle(spec, tables):
    expected = np.array([[poly_mul(a, b, spec) for b in range(spec.q)] for a in range(spec.q)])
    assert np.array_equal(tables.mul, expected)


def test_inverse_table(spec, tables):
    assert tables.inv[0] == 0
    for a in range(1, spec.q):
        assert tables.mul[a, tables.inv[a]] == 1
        assert tables.inv[a] == gf_inv(a, spec)


def test_identities(spec, tables):
    assert not tables.mul[0].any()
    assert np.array_equal(tables.mul[1], np.arange(spec.q))
    assert np.array_equal(tables.pow[:, 0], np.arange(spec.q))


def test_field_axioms(spec, tables):
    """Exhaustive over all q^3 triples, GF(256) included (2^24 via numpy)."""
    m = tables.mul.astype(np.intp)
    q = spec.q
    a, b, c = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij", sparse=True)
    assert np.array_equal(m[m[a, b], c], m[a, m[b, c]])
    assert np.array_equal(m[a, b ^ c], m[a, b] ^ m[a, c])
    assert np.array_equal(m, m.T)


def test_tl_th_decomposition(spec, tables):
    v = np.arange(256)
    for c in range(spec.q):
        got = tables.tl[c][v & 0x0F] ^ tables.th[c][v >> 4]
        want = [
            pack_words([poly_mul(c, int(x), spec) for x in unpack_words(bytes([int(byte)]), spec)], spec)[0]
            for byte in v
        ]
        assert got.tolist() == want


def test_table_examples():
    t4 = get_tables(GF4)
    assert t4.pow[2].tolist() == [2, 3]
    # 0x07 packs words (3, 1); times 2 gives (1, 2) -> 0b1001
    assert t4.tl[2][0x7] == 0b1001
    assert unpack_words(bytes([t4.tl[2][0x7]]), GF4).tolist()[:2] == [1, 2]
    for s in FIELDS.values():
        t = get_tables(s)
        assert not t.tl[0].any() and not t.th[0].any()
    t256 = get_tables(GF256)
    assert np.array_equal(t256.byte_mul, t256.mul)


def test_pow_table(spec, tables):
    for c in range(spec.q):
        for k in range(spec.w):
            assert tables.pow[c][k] == poly_mul(c, 1 << k, spec)


def test_tables_immutable_and_deterministic(spec):
    t = get_tables(spec)
    with pytest.raises(ValueError):
        t.mul[0, 0] = 1
    assert dump_tables(build_tables(spec)) == dump_tables(build_tables(spec))
    text = dump_tables(t)
    for name in ("[mul]", "[inv]", "[tl]", "[th]", "[pow]"):
        assert name in text


def test_pack_examples():
    assert pack_words([3, 2, 1, 0], GF4) == bytes([0x1B])
    assert pack_words([0xAB], GF256) == bytes([0xAB])
    assert pack_words([1, 0, 0, 0, 0, 0, 0, 0], GF2) == bytes([0x01])
    assert unpack_words(bytes([0x1B]), GF4).tolist() == [3, 2, 1, 0]


def test_pack_errors():
    with pytest.raises(ValueError):
        pack_words([4, 0, 0, 0], GF4)
    with pytest.raises(ValueError):
        pack_words([1, 2], GF4)


@given(st.sampled_from(list(FIELDS.values())), st.binary(min_size=0, max_size=64))
def test_pack_unpack_bijection(spec, data):
    assert pack_words(unpack_words(data, spec), spec) == data
    w = unpack_words(data, spec)
    assert np.array_equal(unpack_words(pack_words(w, spec), spec), w)


def test_poly_mul_words_matches_scalar(spec):
    x = np.arange(spec.q)
    for c in range(spec.q):
        assert poly_mul_words(x, c, spec).tolist() == [poly_mul(c, int(v), spec) for v in x]


def test_oracle_madd_gf4_example():
    a = bytes([0x1B]) * 4
    assert oracle_madd(bytes(4), a, 2, GF4).tolist() == [0x2D] * 4


def test_corrupted_copy_is_independent():
    t = get_tables(GF16)
    tl = t.tl.copy()
    tl[3, 5] ^= 1
    bad = dataclasses.replace(t, tl=tl)
    assert bad.tl[3, 5] != t.tl[3, 5]
