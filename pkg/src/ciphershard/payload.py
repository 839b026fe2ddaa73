"""Payload-type selection and fixed-size plain payloads.

Keyword frequency is hidden by giving every keyword a payload of one of two
fixed shapes: an n-bit vector (frequent keywords) or a padded list of exactly
upsilon identifier slots (rare keywords).  The threshold upsilon minimizes
expected storage under a rank-1 Zipf frequency model, so it is computed from
public quantities only.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum


def harmonic(n: int) -> float:
    """N-th harmonic number, accumulated in double precision."""
    if n < 1:
        raise ValueError(f"harmonic number undefined for N={n}")
    # Sum small terms first to limit rounding error.
    return math.fsum(1.0 / k for k in range(n, 0, -1))


def zipf_p(x: int, n: int) -> float:
    """Rank-x probability under the exponent-1 Zipf distribution over n ranks."""
    if not 1 <= x <= n:
        raise ValueError(f"rank {x} outside 1..{n}")
    return 1.0 / (x * harmonic(n))


def expected_storage_actual(upsilon: int, freqs: list[int], n: int, id_bits: int) -> int:
    """Total payload bits for an observed frequency set under threshold upsilon.

    A keyword costs n bits when its frequency is strictly above upsilon,
    otherwise upsilon * id_bits bits.
    """
    if any(f < 0 for f in freqs):
        raise ValueError("frequencies must be non-negative")
    return sum(n if f > upsilon else upsilon * id_bits for f in freqs)


def expected_storage_zipf(t: int, z: int, n: int, id_bits: int) -> float:
    """Expected payload bits when the top-t Zipf ranks get bit vectors.

    The remaining z - t ranks get padded lists of ceil(p(t) * n) members,
    costing p(t) * n * id_bits bits each in expectation.
    """
    if not 1 <= t <= z:
        raise ValueError(f"rank cutoff {t} outside 1..{z}")
    return t * n + (z - t) * zipf_p(t, z) * n * id_bits


def optimal_upsilon(n: int, z: int, id_bits: int) -> int:
    """Storage-optimal padded-list member count for the public Zipf model."""
    if n < 1 or z < 1:
        raise ValueError("n and z must be positive")
    return max(1, math.ceil((id_bits * harmonic(z) * z) ** -0.5 * n))


@dataclass(frozen=True)
class StorageParams:
    """Public sizing parameters of the plain index."""

    n: int
    z: int
    id_bits: int = 32
    upsilon: int = 0  # 0 = derive from the Zipf model

    def __post_init__(self):
        if self.id_bits not in (16, 32, 64):
            raise ValueError(f"id_bits must be 16, 32 or 64, got {self.id_bits}")
        if self.upsilon == 0:
            object.__setattr__(self, "upsilon", optimal_upsilon(self.n, max(1, self.z), self.id_bits))
        if self.upsilon < 1:
            raise ValueError("upsilon must be >= 1")
        if self.n >= (1 << self.id_bits):
            raise ValueError("id_bits too small for corpus size")


class PayloadKind(Enum):
    BITVEC = "bitvec"
    IDLIST = "list"


@dataclass
class PlainPayload:
    """Fixed-size per-keyword identifier container.

    BITVEC: ``bits`` has exactly n entries, bit j set iff doc j matches.
    IDLIST: ``ids`` has exactly upsilon entries; fakes are id 0.
    """

    kind: PayloadKind
    bits: bytearray | None = None   # packed big-endian bit order, n bits used
    ids: list[int] | None = None
    n: int = 0
    upsilon: int = 0

    def slot_of(self, doc_id: int) -> int:
        """1-based slot of a real id: bit position for BITVEC, list position for IDLIST."""
        if self.kind is PayloadKind.BITVEC:
            return doc_id
        return self.ids.index(doc_id) + 1


def _set_bit(buf: bytearray, pos: int) -> None:
    # pos is 1-based; bit 1 = MSB of byte 0
    byte, off = (pos - 1) // 8, (pos - 1) % 8
    buf[byte] |= 0x80 >> off


def bit_is_set(buf: bytes, pos: int) -> bool:
    byte, off = (pos - 1) // 8, (pos - 1) % 8
    return bool(buf[byte] & (0x80 >> off))


def assemble_list_payload(slot_map: dict[int, int], upsilon: int) -> PlainPayload:
    """Build an IDLIST payload from an explicit {doc_id: 1-based slot} assignment."""
    ids = [0] * upsilon
    for doc_id, slot in slot_map.items():
        if not 1 <= slot <= upsilon:
            raise ValueError(f"slot {slot} outside 1..{upsilon}")
        if ids[slot - 1] != 0:
            raise ValueError(f"slot {slot} assigned twice")
        ids[slot - 1] = doc_id
    return PlainPayload(PayloadKind.IDLIST, ids=ids, upsilon=upsilon)


def build_payload(postings: list[int], params: StorageParams,
                  rng: random.Random) -> PlainPayload:
    """Build the fixed-size payload for one keyword.

    Frequencies strictly above upsilon take the n-bit-vector form; anything
    else becomes an upsilon-slot list whose real ids land at uniformly
    shuffled slot positions (fakes, id 0, fill the rest).
    """
    if any(not 1 <= d <= params.n for d in postings):
        raise ValueError("posting id outside 1..n at setup")
    if len(set(postings)) != len(postings):
        raise ValueError("duplicate ids in posting list")
    if len(postings) > params.upsilon:
        bits = bytearray((params.n + 7) // 8)
        for d in postings:
            _set_bit(bits, d)
        return PlainPayload(PayloadKind.BITVEC, bits=bits, n=params.n)
    slots = list(range(1, params.upsilon + 1))
    rng.shuffle(slots)
    order = list(postings)
    rng.shuffle(order)
    return assemble_list_payload(dict(zip(order, slots)), params.upsilon)
