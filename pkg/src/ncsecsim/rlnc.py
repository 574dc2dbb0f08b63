"""Random linear network coding over a generation of native packets.

A generation is a block of m native payloads of n field symbols each.
Sources emit random linear combinations, intermediate nodes recode by
combining whatever they hold with fresh local coefficients, and the
destination recovers the natives by Gaussian elimination once it has m
linearly independent coded packets.  Tags riding on packets are combined
with the same coefficients so the MAC homomorphism survives recoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    GenerationMismatch,
    InvalidParameter,
    PollutionDetectedAtDecode,
)
from .gf import FieldSpec, FieldVector


@dataclass(frozen=True)
class Generation:
    """The m native payload vectors that are coded together."""

    gen_id: str
    natives: np.ndarray  # shape (m, n)
    spec: FieldSpec

    def __post_init__(self):
        raw = np.asarray(self.natives)
        if raw.ndim != 2 or raw.shape[0] < 1 or raw.shape[1] < 1:
            raise InvalidParameter(f"natives must be a non-empty 2-d array, got {raw.shape}")
        if int(raw.min()) < 0 or int(raw.max()) >= self.spec.q:
            raise InvalidParameter("native symbol outside the field")
        object.__setattr__(self, "natives", raw.astype(self.spec.dtype))

    @property
    def m(self) -> int:
        return int(self.natives.shape[0])

    @property
    def n(self) -> int:
        return int(self.natives.shape[1])


def random_generation(
    gen_id: str, m: int, n: int, spec: FieldSpec, rng: np.random.Generator
) -> Generation:
    return Generation(gen_id, spec.random_elements(rng, (m, n)), spec)


@dataclass
class CodedPacket:
    """One in-transit packet: coding coefficients, payload, attached tags."""

    gen_id: str
    coeffs: FieldVector
    payload: FieldVector
    tags: FieldVector = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.tags is None:
            self.tags = FieldVector.zeros(0, self.coeffs.spec)

    @property
    def spec(self) -> FieldSpec:
        return self.coeffs.spec


def encode(gen: Generation, rng: np.random.Generator) -> CodedPacket:
    """Source encoding: uniform random coefficients over the whole field."""
    coeffs = gen.spec.random_elements(rng, gen.m)
    payload = gen.spec.combine_rows(coeffs, gen.natives)
    return CodedPacket(
        gen.gen_id,
        FieldVector(coeffs, gen.spec, _checked=True),
        FieldVector(payload, gen.spec, _checked=True),
    )


def _check_same_shape(packets: list[CodedPacket]) -> None:
    first = packets[0]
    for p in packets[1:]:
        if p.gen_id != first.gen_id:
            raise GenerationMismatch(f"mixed generations {first.gen_id!r}, {p.gen_id!r}")
        if (
            len(p.coeffs) != len(first.coeffs)
            or len(p.payload) != len(first.payload)
            or p.spec != first.spec
        ):
            raise DimensionMismatch("packets with different dimensions")


def recode(packets: list[CodedPacket], rng: np.random.Generator) -> CodedPacket:
    """Recode at an intermediate node.

    Applies one set of fresh uniform local coefficients to coefficients,
    payloads, and tags alike.  An all-zero local draw is redrawn once and
    then accepted, so a fixed seed still gives a reproducible stream.
    """
    if not packets:
        raise EmptyInput("recode needs at least one packet")
    _check_same_shape(packets)
    tag_len = len(packets[0].tags)
    for p in packets:
        if len(p.tags) != tag_len:
            raise DimensionMismatch("packets carry different tag counts")
    spec = packets[0].spec
    local = spec.random_elements(rng, len(packets))
    if not local.any():
        local = spec.random_elements(rng, len(packets))
    coeffs = spec.combine_rows(local, np.vstack([p.coeffs.elems for p in packets]))
    payload = spec.combine_rows(local, np.vstack([p.payload.elems for p in packets]))
    pkt = CodedPacket(
        packets[0].gen_id,
        FieldVector(coeffs, spec, _checked=True),
        FieldVector(payload, spec, _checked=True),
    )
    if tag_len:
        tags = spec.combine_rows(local, np.vstack([p.tags.elems for p in packets]))
        pkt.tags = FieldVector(tags, spec, _checked=True)
    return pkt


@dataclass(frozen=True)
class DecodeResult:
    """Either the recovered natives (rank == m) or a rank-deficiency report."""

    rank: int
    natives: np.ndarray | None

    @property
    def complete(self) -> bool:
        return self.natives is not None


def decode(packets: list[CodedPacket]) -> DecodeResult:
    """Gaussian elimination over the field; exact arithmetic, no pivot scaling
    tricks (pivot is simply the first nonzero entry in the column)."""
    if not packets:
        raise EmptyInput("decode needs at least one packet")
    _check_same_shape(packets)
    spec = packets[0].spec
    m = len(packets[0].coeffs)
    aug = np.vstack(
        [np.concatenate([p.coeffs.elems, p.payload.elems]) for p in packets]
    ).astype(spec.dtype)
    rows = aug.shape[0]
    rank = 0
    for col in range(m):
        pivot = None
        for r in range(rank, rows):
            if aug[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        if pivot != rank:
            aug[[rank, pivot]] = aug[[pivot, rank]]
        aug[rank] = spec.vec_mul(spec.inv(int(aug[rank, col])), aug[rank])
        others = np.nonzero(aug[:, col])[0]
        others = others[others != rank]
        if others.size:
            aug[others] ^= spec.vec_mul(aug[others, col][:, None], aug[rank][None, :])
        rank += 1
    # A row with zero coefficients but nonzero payload means the received
    # packets were not all combinations of one native set.
    tail = aug[rank:]
    if tail.size and (~tail[:, :m].any(axis=1) & tail[:, m:].any(axis=1)).any():
        raise PollutionDetectedAtDecode("inconsistent system: polluted input")
    if rank < m:
        return DecodeResult(rank=rank, natives=None)
    return DecodeResult(rank=m, natives=aug[:m, m:].copy())


def in_row_space(payload: FieldVector, gen: Generation) -> bool:
    """Rank test for row-space membership of a payload vector."""
    stacked = np.vstack([gen.natives, payload.elems[None, :]])
    return _matrix_rank(stacked, gen.spec) == _matrix_rank(gen.natives, gen.spec)


def _matrix_rank(matrix: np.ndarray, spec: FieldSpec) -> int:
    work = np.asarray(matrix, dtype=spec.dtype).copy()
    rows, cols = work.shape
    rank = 0
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if work[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        if pivot != rank:
            work[[rank, pivot]] = work[[pivot, rank]]
        work[rank] = spec.vec_mul(spec.inv(int(work[rank, col])), work[rank])
        below = np.nonzero(work[rank + 1 :, col])[0] + rank + 1
        if below.size:
            work[below] ^= spec.vec_mul(work[below, col][:, None], work[rank][None, :])
        rank += 1
        if rank == rows:
            break
    return rank
