import numpy as np
import pytest

from ncsecsim.errors import DimensionMismatch, InvalidParameter, InversionOfZero
from ncsecsim.gf import GF16, GF256, FieldSpec, FieldVector, axpy, dot, inv

from oracles import axpy_oracle, dot_oracle, inv_oracle, mul_oracle


def test_published_aes_field_values():
    # 0x53 * 0xCA = 1 under 0x11B; confirmed by the shift-and-reduce oracle.
    assert mul_oracle(0x53, 0xCA, 8, 0x11B) == 0x01
    assert GF256.mul(0x53, 0xCA) == 0x01
    assert inv_oracle(0x02, 8, 0x11B) == 0x8D
    assert GF256.inv(0x02) == 0x8D


def test_mul_identity_and_annihilator():
    for x in range(256):
        assert GF256.mul(x, 1) == x
        assert GF256.mul(x, 0) == 0


def test_mul_matches_oracle_exhaustive_k4():
    for a in range(16):
        for b in range(16):
            assert GF16.mul(a, b) == mul_oracle(a, b, 4, GF16.poly)


def test_mul_matches_oracle_random_k8():
    rng = np.random.default_rng(0)
    for a, b in rng.integers(0, 256, size=(2000, 2)):
        assert GF256.mul(int(a), int(b)) == mul_oracle(int(a), int(b), 8, 0x11B)


@pytest.mark.parametrize("k", [2, 4, 8])
def test_inverse_defining_property_exhaustive(k):
    spec = FieldSpec(k)
    for a in range(1, spec.q):
        assert spec.mul(a, spec.inv(a)) == 1
        assert spec.inv(a) == inv_oracle(a, k, spec.poly)


def test_inverse_of_one_and_zero():
    assert GF256.inv(1) == 1
    with pytest.raises(InversionOfZero):
        GF256.inv(0)
    with pytest.raises(InversionOfZero):
        inv(0, GF16)


def test_distributivity_exhaustive_k4():
    for a in range(16):
        for b in range(16):
            for c in range(16):
                assert GF16.mul(a, b ^ c) == GF16.mul(a, b) ^ GF16.mul(a, c)


def test_distributivity_randomized_k8():
    rng = np.random.default_rng(1)
    a, b, c = (rng.integers(0, 256, size=100_000, dtype=np.uint8) for _ in range(3))
    lhs = GF256.vec_mul(a, b ^ c)
    rhs = GF256.vec_mul(a, b) ^ GF256.vec_mul(a, c)
    assert np.array_equal(lhs, rhs)


def test_commutativity_and_associativity_random():
    rng = np.random.default_rng(2)
    for a, b, c in rng.integers(0, 256, size=(500, 3)):
        a, b, c = int(a), int(b), int(c)
        assert GF256.mul(a, b) == GF256.mul(b, a)
        assert GF256.mul(GF256.mul(a, b), c) == GF256.mul(a, GF256.mul(b, c))


@pytest.mark.parametrize("k", [2, 4, 8])
def test_nonzero_elements_form_group_of_order_q_minus_1(k):
    spec = FieldSpec(k)
    for a in range(1, spec.q):
        assert spec.pow(a, spec.q - 1) == 1
    # the searched generator really has full order
    seen = set()
    val = 1
    for _ in range(spec.q - 1):
        seen.add(val)
        val = spec.mul(val, spec.generator)
    assert seen == set(range(1, spec.q))


def test_dot_zero_and_unit_vectors():
    rng = np.random.default_rng(3)
    v = FieldVector.random(8, GF256, rng)
    zero = FieldVector.zeros(8, GF256)
    assert dot(v, zero) == 0
    for i in range(8):
        e = FieldVector.zeros(8, GF256)
        e.elems[i] = 1
        assert dot(e, v) == v[i]


def test_dot_matches_loop_oracle():
    rng = np.random.default_rng(4)
    for _ in range(50):
        u = FieldVector.random(8, GF256, rng)
        v = FieldVector.random(8, GF256, rng)
        assert dot(u, v) == dot_oracle(u.tolist(), v.tolist(), 8, 0x11B)


def test_dot_bilinearity_randomized():
    rng = np.random.default_rng(5)
    spec = GF256
    u = spec.random_elements(rng, (10_000, 8))
    v = spec.random_elements(rng, (10_000, 8))
    w = spec.random_elements(rng, (10_000, 8))
    alpha = spec.random_elements(rng, (10_000, 1))
    combo = spec.vec_mul(alpha, u) ^ v
    lhs = np.bitwise_xor.reduce(spec.vec_mul(combo, w), axis=1)
    rhs = np.bitwise_xor.reduce(
        spec.vec_mul(alpha, np.bitwise_xor.reduce(spec.vec_mul(u, w), axis=1)[:, None]),
        axis=1,
    ) ^ np.bitwise_xor.reduce(spec.vec_mul(v, w), axis=1)
    assert np.array_equal(lhs, rhs)


def test_axpy_cases():
    rng = np.random.default_rng(6)
    x = FieldVector.random(6, GF256, rng)
    y = FieldVector.random(6, GF256, rng)
    assert axpy(0, x, y) == y
    assert axpy(1, x, x).is_zero()  # characteristic 2
    got = axpy(0x37, x, y)
    assert got.tolist() == axpy_oracle(0x37, x.tolist(), y.tolist(), 8, 0x11B)


def test_length_and_spec_mismatches_raise():
    rng = np.random.default_rng(7)
    a = FieldVector.random(4, GF256, rng)
    b = FieldVector.random(5, GF256, rng)
    c = FieldVector.random(4, GF16, rng)
    with pytest.raises(DimensionMismatch):
        dot(a, b)
    with pytest.raises(DimensionMismatch):
        axpy(1, a, b)
    with pytest.raises(DimensionMismatch):
        dot(a, c)


def test_invalid_specs_rejected():
    with pytest.raises(InvalidParameter):
        FieldSpec(8, reduction_polynomial=0x1B)  # degree 4, not 8
    with pytest.raises(InvalidParameter):
        FieldSpec(8, reduction_polynomial=0x100)  # x^8, divisible by x
    with pytest.raises(InvalidParameter):
        FieldSpec(0)
    with pytest.raises(InvalidParameter):
        FieldSpec(17)
    with pytest.raises(InvalidParameter):
        FieldVector([300], GF256)


def test_all_default_polynomials_are_irreducible():
    for k in range(1, 17):
        spec = FieldSpec(k)
        assert spec.q == 1 << k


def test_wide_field_fallback_matches_oracle():
    spec = FieldSpec(12)
    rng = np.random.default_rng(8)
    for a, b in rng.integers(0, spec.q, size=(200, 2)):
        a, b = int(a), int(b)
        assert spec.mul(a, b) == mul_oracle(a, b, 12, spec.poly)
    for a in (1, 2, 5, 1000, spec.q - 1):
        assert spec.mul(a, spec.inv(a)) == 1
    u = FieldVector.random(5, spec, rng)
    v = FieldVector.random(5, spec, rng)
    assert dot(u, v) == dot_oracle(u.tolist(), v.tolist(), 12, spec.poly)
