import numpy as np
import pytest

from ncsecsim.errors import (
    DimensionMismatch,
    EmptyInput,
    GenerationMismatch,
    PollutionDetectedAtDecode,
)
from ncsecsim.gf import GF16, GF256, FieldVector
from ncsecsim.rlnc import (
    CodedPacket,
    Generation,
    decode,
    encode,
    in_row_space,
    random_generation,
    recode,
)

from oracles import matvec_oracle


class StubRng:
    """Yields pre-set integer draws so coefficient vectors can be forced."""

    def __init__(self, *draws):
        self._draws = list(draws)

    def integers(self, low, high, size=None, dtype=None):
        out = np.asarray(self._draws.pop(0), dtype=dtype or np.int64)
        return out


@pytest.fixture
def gen():
    rng = np.random.default_rng(10)
    return random_generation("g", 4, 16, GF256, rng)


def test_encode_unit_coefficients_reproduce_natives(gen):
    for i in range(gen.m):
        unit = [0] * gen.m
        unit[i] = 1
        pkt = encode(gen, StubRng(unit))
        assert pkt.payload.tolist() == list(map(int, gen.natives[i]))
        assert pkt.coeffs.tolist() == unit
        assert len(pkt.tags) == 0


def test_encode_zero_coefficients_give_zero_payload(gen):
    pkt = encode(gen, StubRng([0] * gen.m))
    assert pkt.payload.is_zero()


def test_encode_matches_matrix_product_oracle(gen):
    rng = np.random.default_rng(11)
    for _ in range(20):
        pkt = encode(gen, rng)
        expect = matvec_oracle(pkt.coeffs.tolist(), gen.natives, 8, 0x11B)
        assert pkt.payload.tolist() == expect


def test_recode_single_packet_identity(gen):
    rng = np.random.default_rng(12)
    pkt = encode(gen, rng)
    pkt.tags = FieldVector([3, 7], GF256)
    out = recode([pkt], StubRng([1]))
    assert out.coeffs == pkt.coeffs
    assert out.payload == pkt.payload
    assert out.tags == pkt.tags


def test_recode_same_packet_twice_cancels(gen):
    rng = np.random.default_rng(13)
    pkt = encode(gen, rng)
    pkt.tags = FieldVector([9], GF256)
    out = recode([pkt, pkt], StubRng([1, 1]))
    assert out.coeffs.is_zero() and out.payload.is_zero() and out.tags.is_zero()


def test_recode_zero_draw_is_redrawn_once(gen):
    rng = np.random.default_rng(14)
    pkt = encode(gen, rng)
    out = recode([pkt], StubRng([0], [2]))
    assert out.coeffs == pkt.coeffs.scale(2)


def test_recode_rejects_mixed_generations(gen):
    rng = np.random.default_rng(15)
    other = random_generation("other", 4, 16, GF256, rng)
    with pytest.raises(GenerationMismatch):
        recode([encode(gen, rng), encode(other, rng)], rng)
    with pytest.raises(EmptyInput):
        recode([], rng)
    a, b = encode(gen, rng), encode(gen, rng)
    a.tags = FieldVector([1, 2], GF256)
    b.tags = FieldVector([1], GF256)
    with pytest.raises(DimensionMismatch):
        recode([a, b], rng)


def test_decode_identity_matrix_returns_natives(gen):
    packets = []
    for i in range(gen.m):
        unit = [0] * gen.m
        unit[i] = 1
        packets.append(encode(gen, StubRng(unit)))
    result = decode(packets)
    assert result.complete
    assert np.array_equal(result.natives, gen.natives)


def test_decode_rank_deficiency_reported(gen):
    rng = np.random.default_rng(16)
    packets = [encode(gen, rng) for _ in range(gen.m - 1)]
    result = decode(packets)
    assert not result.complete
    assert result.rank == gen.m - 1
    assert result.natives is None


def test_decode_roundtrip_random_generations():
    # 100 seeded generations, q=256: full-rank receptions decode exactly.
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        g = random_generation(f"g{seed}", 4, 16, GF256, rng)
        packets = [encode(g, rng) for _ in range(8)]
        result = decode(packets)
        if result.complete:  # 8 draws of rank-4 almost surely
            assert np.array_equal(result.natives, g.natives)
        else:
            assert result.rank < g.m


def test_recoding_closure_stays_in_row_space(gen):
    rng = np.random.default_rng(17)
    pool = [encode(gen, rng) for _ in range(3)]
    for _ in range(20):
        pick = [pool[i] for i in rng.integers(0, len(pool), size=2)]
        mixed = recode(pick, rng)
        assert in_row_space(mixed.payload, gen)
        pool.append(mixed)


def test_decode_inconsistent_system_flags_pollution(gen):
    packets = []
    for i in range(gen.m):
        unit = [0] * gen.m
        unit[i] = 1
        packets.append(encode(gen, StubRng(unit)))
    forged = CodedPacket(
        gen.gen_id,
        packets[0].coeffs.copy(),
        packets[1].payload.copy(),  # wrong payload for these coefficients
    )
    with pytest.raises(PollutionDetectedAtDecode):
        decode(packets + [forged])


def test_pollution_propagates_through_recoding():
    # Mixing one polluted packet in leaves the row space unless the local
    # coefficient for it happens to be zero (probability 1/q).
    spec = GF16
    rng = np.random.default_rng(18)
    g = random_generation("p", 3, 8, spec, rng)
    trials, outside = 10_000, 0
    for _ in range(trials):
        polluted = encode(g, rng)
        polluted.payload.elems[int(rng.integers(0, g.n))] ^= 1 + int(
            rng.integers(0, spec.q - 1)
        )
        mixed = recode([polluted, encode(g, rng)], rng)
        if not in_row_space(mixed.payload, g):
            outside += 1
    rate = outside / trials
    sigma = np.sqrt((1 / 16) * (15 / 16) / trials)
    assert rate >= 1 - 1 / 16 - 3 * sigma


def test_generation_validation():
    with pytest.raises(Exception):
        Generation("bad", np.zeros((0, 4), dtype=np.uint8), GF256)
    with pytest.raises(Exception):
        Generation("bad", np.full((2, 2), 999), GF256)
