"""Homomorphic MAC tags and ledger-backed tag comparison.

A MAC key is a secret vector of length n+1 over the coding field with a
nonzero last element.  The tag of a payload p is the unique t for which
the inner product of (p, t) with the key vanishes:

    t = dot(p, key[0..n)) / key[n]

The map p -> t is linear, so the tag of any linear combination of
payloads equals the same combination of their tags, and tags survive
recoding untouched.  Verification is a single inner product.

Against an adversary holding every key, key checks alone are useless.
The ledger stores the source's native tag matrix; the expected tags of a
coded packet follow from its coding coefficients, and any payload or tag
modification breaks that comparison.  Coding coefficients are not covered
by the key inner product (the key has n+1 elements, not m+n+1); tampering
with them is caught by the same ledger comparison instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidParameter, TagSetUnavailable
from .gf import FieldSpec, FieldVector
from .rlnc import CodedPacket, Generation


@dataclass(frozen=True)
class MacKey:
    """Secret vector in GF(q)^(n+1) defining one homomorphic MAC."""

    key_id: str
    vec: FieldVector
    domain_id: str

    def __post_init__(self):
        if len(self.vec) < 2:
            raise InvalidParameter("key vector needs at least 2 elements")
        if self.vec[len(self.vec) - 1] == 0:
            raise InvalidParameter("last key element must be nonzero")

    @property
    def payload_len(self) -> int:
        return len(self.vec) - 1


def generate_key(
    n: int,
    spec: FieldSpec,
    rng: np.random.Generator,
    key_id: str,
    domain_id: str,
) -> MacKey:
    """Uniform random key; the last element is redrawn until nonzero."""
    vec = spec.random_elements(rng, n + 1)
    while vec[n] == 0:
        vec[n] = spec.random_elements(rng, 1)[0]
    return MacKey(key_id, FieldVector(vec, spec, _checked=True), domain_id)


def generate_domain_keys(
    n: int,
    count: int,
    spec: FieldSpec,
    rng: np.random.Generator,
    domain_id: str,
) -> tuple[MacKey, ...]:
    return tuple(
        generate_key(n, spec, rng, key_id=f"{domain_id}/k{i}", domain_id=domain_id)
        for i in range(count)
    )


def make_tag(payload: FieldVector, key: MacKey) -> int:
    """Tag t with dot((payload || t), key.vec) == 0."""
    if len(payload) != key.payload_len:
        raise DimensionMismatch(
            f"payload length {len(payload)} does not match key dimension "
            f"{key.payload_len}+1"
        )
    spec = key.vec.spec
    head = spec.vec_dot(payload.elems, key.vec.elems[:-1])
    return spec.div(head, key.vec[len(key.vec) - 1])


def attach_tags(pkt: CodedPacket, keys: Sequence[MacKey]) -> CodedPacket:
    """Return a copy of pkt carrying one tag per key, in key order."""
    spec = pkt.spec
    tags = [make_tag(pkt.payload, k) for k in keys]
    return CodedPacket(
        pkt.gen_id,
        pkt.coeffs.copy(),
        pkt.payload.copy(),
        FieldVector(np.array(tags, dtype=spec.dtype), spec, _checked=True),
    )


def verify_tags(
    pkt: CodedPacket,
    keys: Sequence[MacKey],
    positions: Sequence[int] | None = None,
) -> list[bool]:
    """Per-key verdicts: dot((payload || tags[pos]), key.vec) == 0.

    ``positions`` maps each supplied key to its tag slot; by default key i
    checks tag i.  A node holding a subset of the source keys passes that
    subset along with the slots those keys correspond to.
    """
    if positions is None:
        positions = range(len(keys))
    positions = list(positions)
    if len(positions) != len(keys):
        raise DimensionMismatch("one tag position per key required")
    if any(p < 0 or p >= len(pkt.tags) for p in positions):
        raise DimensionMismatch("tag position outside the packet's tag vector")
    spec = pkt.spec
    verdicts = []
    for key, pos in zip(keys, positions):
        if key.payload_len != len(pkt.payload):
            raise DimensionMismatch("key dimension does not match payload")
        acc = spec.vec_dot(pkt.payload.elems, key.vec.elems[:-1])
        acc ^= spec.mul(pkt.tags[pos], key.vec[len(key.vec) - 1])
        verdicts.append(acc == 0)
    return verdicts


def combine_tags(tag_rows: np.ndarray | Sequence[Sequence[int]], coeffs: FieldVector) -> FieldVector:
    """Expected tag vector of a coded packet from ledgered native tags.

    ``tag_rows`` is the m x l native tag matrix; the result is the same
    linear combination of rows that produced the packet's payload.
    """
    spec = coeffs.spec
    rows = np.asarray(tag_rows, dtype=spec.dtype)
    if rows.ndim != 2:
        raise DimensionMismatch("tag rows must form a 2-d matrix")
    if rows.shape[0] != len(coeffs):
        raise DimensionMismatch(
            f"{rows.shape[0]} tag rows vs {len(coeffs)} coefficients"
        )
    return FieldVector(spec.combine_rows(coeffs.elems, rows), spec, _checked=True)


@dataclass(frozen=True)
class TagSet:
    """Ledgered native tags for one generation: m rows of l tags."""

    gen_id: str
    source_id: str
    native_tags: np.ndarray  # shape (m, l)

    def __post_init__(self):
        arr = np.asarray(self.native_tags)
        if arr.ndim != 2:
            raise InvalidParameter("native_tags must be m x l")
        object.__setattr__(self, "native_tags", arr)


def tagset_for_generation(
    gen: Generation, keys: Sequence[MacKey], source_id: str
) -> TagSet:
    """Tags of every native payload, as uploaded by the source."""
    rows = np.zeros((gen.m, len(keys)), dtype=gen.spec.dtype)
    for i in range(gen.m):
        payload = FieldVector(gen.natives[i], gen.spec, _checked=True)
        for j, key in enumerate(keys):
            rows[i, j] = make_tag(payload, key)
    return TagSet(gen.gen_id, source_id, rows)


def ledger_check(
    pkt: CodedPacket,
    tagset: TagSet | None,
    keys: Sequence[MacKey] = (),
    positions: Sequence[int] | None = None,
) -> bool:
    """Accept iff the carried tags equal the ledger-derived expectation and
    every locally held key verifies.

    Even an adversary holding all keys cannot pass a payload-modified
    packet: it would need matching tags, but those are pinned by the
    ledger rows it cannot rewrite.
    """
    if tagset is None:
        raise TagSetUnavailable(f"no ledgered tags for generation {pkt.gen_id!r}")
    if tagset.gen_id != pkt.gen_id:
        raise TagSetUnavailable(
            f"tag set covers {tagset.gen_id!r}, packet is {pkt.gen_id!r}"
        )
    expected = combine_tags(tagset.native_tags, pkt.coeffs)
    if expected != pkt.tags:
        return False
    return all(verify_tags(pkt, keys, positions)) if keys else True
