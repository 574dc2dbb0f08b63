import numpy as np
import pytest

from ncsecsim._stats import binomial_sigma
from ncsecsim.attack import (
    AdversaryConfig,
    AdversaryKnowledge,
    AttackStrategy,
    bypass_rate_grid,
    inject,
    measure_bypass_rate,
)
from ncsecsim.errors import InvalidParameter
from ncsecsim.gf import GF16
from ncsecsim.integrity import attach_tags, generate_domain_keys, verify_tags
from ncsecsim.keydist import Scheme, SchemeConfig
from ncsecsim.rlnc import encode, random_generation


@pytest.fixture
def tagged_packet():
    rng = np.random.default_rng(60)
    gen = random_generation("a", 3, 12, GF16, rng)
    keys = generate_domain_keys(12, 4, GF16, rng, "d")
    return rng, gen, keys, attach_tags(encode(gen, rng), keys)


def test_tag_only_pollution_touches_tags_only(tagged_packet):
    rng, _, _, pkt = tagged_packet
    adv = AdversaryConfig(strategy=AttackStrategy.TAG_ONLY_POLLUTION)
    out = inject(pkt, adv, rng=rng)
    assert out.strategy_used is AttackStrategy.TAG_ONLY_POLLUTION
    assert out.packet.payload == pkt.payload
    assert out.packet.coeffs == pkt.coeffs
    diffs = int((out.packet.tags.elems != pkt.tags.elems).sum())
    assert diffs == 1


def test_valid_tag_forge_with_all_keys_passes_key_checks(tagged_packet):
    rng, _, keys, pkt = tagged_packet
    adv = AdversaryConfig(knowledge=AdversaryKnowledge.ALL_KEYS,
                          strategy=AttackStrategy.VALID_TAG_FORGE)
    out = inject(pkt, adv, held_keys=keys, rng=rng)
    assert out.strategy_used is AttackStrategy.VALID_TAG_FORGE
    assert out.packet.payload != pkt.payload
    assert all(verify_tags(out.packet, keys))


def test_valid_tag_forge_without_keys_degenerates(tagged_packet):
    rng, _, _, pkt = tagged_packet
    adv = AdversaryConfig(strategy=AttackStrategy.VALID_TAG_FORGE)
    out = inject(pkt, adv, held_keys=(), rng=rng)
    assert out.strategy_used is AttackStrategy.RANDOM_FORGE


def test_payload_perturbation_is_minimal(tagged_packet):
    rng, _, _, pkt = tagged_packet
    adv = AdversaryConfig(strategy=AttackStrategy.RANDOM_FORGE)
    for _ in range(50):
        forged = inject(pkt, adv, rng=rng).packet
        assert int((forged.payload.elems != pkt.payload.elems).sum()) == 1


def test_adversary_count_validated():
    with pytest.raises(InvalidParameter):
        AdversaryConfig(count=0)


BASELINE = SchemeConfig(Scheme.C_COVER_FREE, l=8, L=16, q=16, m=4, n=32)
LEDGERED = SchemeConfig(Scheme.BLOCKCHAIN, l=8, q=16, m=4, n=32)


def test_bypass_rate_tracks_security_level():
    rng = np.random.default_rng(61)
    adv = AdversaryConfig(strategy=AttackStrategy.RANDOM_FORGE)
    for l_prime, expected in ((1, 1 / 16), (2, 1 / 256)):
        res = measure_bypass_rate(BASELINE, adv, 300_000, rng, l_prime=l_prime)
        assert abs(res.rate - expected) <= 3 * binomial_sigma(expected, res.trials)
        assert res.ci_low <= expected <= res.ci_high


def test_bypass_rate_monotone_in_verified_tags():
    rng = np.random.default_rng(62)
    adv = AdversaryConfig(strategy=AttackStrategy.RANDOM_FORGE)
    rates = [
        measure_bypass_rate(BASELINE, adv, 50_000, rng, l_prime=lp).rate
        for lp in (0, 1, 2)
    ]
    assert rates[0] == 1.0  # zero matching keys: nothing can be verified
    assert rates[0] > rates[1] > rates[2]


def test_ledger_rejects_every_strategy_and_knowledge_level():
    rng = np.random.default_rng(63)
    for strategy in AttackStrategy:
        for knowledge in AdversaryKnowledge:
            adv = AdversaryConfig(count=3, knowledge=knowledge, strategy=strategy)
            res = measure_bypass_rate(LEDGERED, adv, 2_000 if strategy is not
                                      AttackStrategy.RANDOM_FORGE else 5_000, rng)
            assert res.rate == 0.0, (strategy, knowledge)


def test_trial_floor_enforced():
    rng = np.random.default_rng(64)
    with pytest.raises(InvalidParameter):
        measure_bypass_rate(BASELINE, AdversaryConfig(), 100, rng)


def test_grid_rows_cover_documented_cases():
    rng = np.random.default_rng(65)
    rows = bypass_rate_grid(16, trials=5_000, rng=rng)
    by_key = {(r.scheme, r.strategy, r.l_prime): r for r in rows}
    assert by_key[("blockchain", "valid_tag_forge", 8)].rate == 0.0
    assert by_key[("hmac", "random_forge", 0)].rate == 1.0
    lp1 = by_key[("hmac", "random_forge", 1)]
    assert abs(lp1.rate - 1 / 16) <= 4 * binomial_sigma(1 / 16, lp1.trials)
