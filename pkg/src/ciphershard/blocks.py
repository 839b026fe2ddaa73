"""Splitting plain payloads into kappa-bit blocks and encrypting them.

Basic mode masks each block with one oracle output per block index.  In
authorization mode every document identifier is masked under its own group's
key (per-slot windows for list blocks, per-bit selection for bit vectors) and
every block additionally carries an owner-keyed copy so superuser queries can
skip the per-group work.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import random

from .crypto import KAPPA, KeyRing, RandomOracle, derive_oracle_key, prf_tag, xor_bytes
from .payload import PayloadKind, PlainPayload

BLOCK_BYTES = KAPPA // 8
TAG_BYTES = 32

KIND_LIST_FLAG = 0x01
OWNER_FLAG = 0x40
SIGNAL_FLAG = 0x80


class BlockError(ValueError):
    pass


@dataclass(frozen=True)
class BlockGeometry:
    """Derived sizing constants shared by owner and store."""

    id_bits: int = 32
    kappa: int = KAPPA

    @property
    def id_bytes(self) -> int:
        return self.id_bits // 8

    @property
    def cp(self) -> int:
        """Identifiers hosted per list block."""
        return self.kappa // self.id_bits

    @property
    def eta(self) -> int:
        """Signal-array width; one validity bit per list slot."""
        return self.cp

    @property
    def signal_bytes(self) -> int:
        return (self.eta + 7) // 8

    def ell(self, n: int) -> int:
        """Bit-vector block count."""
        return (n + self.kappa - 1) // self.kappa

    def iota(self, upsilon: int) -> int:
        """List block count."""
        return (upsilon + self.cp - 1) // self.cp

    def bit_location(self, doc_id: int) -> tuple[int, int]:
        """(block, slot) of a document id inside a bit-vector payload."""
        return (doc_id - 1) // self.kappa + 1, (doc_id - 1) % self.kappa + 1

    def list_location(self, position: int) -> tuple[int, int]:
        """(block, slot) of a 1-based global list-slot position."""
        return (position - 1) // self.cp + 1, (position - 1) % self.cp + 1


@dataclass
class EncryptedBlock:
    """One stored index block: masked payload plus location metadata.

    ``index`` is the oracle input the block was masked with; after additions
    it can differ from the column the block occupies.  ``signal`` is a bitmask
    of invalidated list slots (bit for slot 1 is the MSB of the eta-bit field),
    present only once an update has touched the block.
    """

    index: int
    kind: PayloadKind
    user: bytes
    owner: bytes | None = None
    signal: int | None = None

    def encode(self, geom: BlockGeometry) -> bytes:
        flags = KIND_LIST_FLAG if self.kind is PayloadKind.IDLIST else 0
        if self.owner is not None:
            flags |= OWNER_FLAG
        if self.signal is not None:
            flags |= SIGNAL_FLAG
        out = bytes([flags]) + self.index.to_bytes(4, "big") + self.user
        if self.owner is not None:
            out += self.owner
        if self.signal is not None:
            out += self.signal.to_bytes(geom.signal_bytes, "big")
        return out

    @classmethod
    def decode(cls, raw: bytes, geom: BlockGeometry) -> "EncryptedBlock":
        flags = raw[0]
        kind = PayloadKind.IDLIST if flags & KIND_LIST_FLAG else PayloadKind.BITVEC
        index = int.from_bytes(raw[1:5], "big")
        pos = 5
        user = raw[pos:pos + BLOCK_BYTES]
        pos += BLOCK_BYTES
        owner = None
        if flags & OWNER_FLAG:
            owner = raw[pos:pos + BLOCK_BYTES]
            pos += BLOCK_BYTES
        signal = None
        if flags & SIGNAL_FLAG:
            signal = int.from_bytes(raw[pos:pos + geom.signal_bytes], "big")
            pos += geom.signal_bytes
        if pos != len(raw):
            raise BlockError(f"trailing bytes in block record ({len(raw) - pos})")
        return cls(index, kind, user, owner, signal)

    def signal_bit(self, slot: int, geom: BlockGeometry) -> bool:
        if self.signal is None:
            return False
        return bool(self.signal >> (geom.eta - slot) & 1)

    def with_signal_bit(self, slot: int, geom: BlockGeometry) -> "EncryptedBlock":
        mask = 1 << (geom.eta - slot)
        return replace(self, signal=(self.signal or 0) | mask)


@dataclass
class EncryptedEntry:
    tag: bytes
    kind: PayloadKind          # payload kind chosen at setup
    blocks: list[EncryptedBlock]


def split_blocks(payload: PlainPayload, geom: BlockGeometry) -> list[bytes]:
    """Divide a payload into kappa-bit plain blocks, zero-padded at the tail."""
    if payload.kind is PayloadKind.BITVEC:
        ell = geom.ell(payload.n)
        buf = bytes(payload.bits) + b"\x00" * (ell * BLOCK_BYTES - len(payload.bits))
        return [buf[j * BLOCK_BYTES:(j + 1) * BLOCK_BYTES] for j in range(ell)]
    iota = geom.iota(payload.upsilon)
    padded = payload.ids + [0] * (iota * geom.cp - len(payload.ids))
    return [pack_ids(padded[j * geom.cp:(j + 1) * geom.cp], geom) for j in range(iota)]


def pack_ids(ids: list[int], geom: BlockGeometry) -> bytes:
    """Fixed-width big-endian identifier packing into one kappa-bit block."""
    if len(ids) != geom.cp:
        raise BlockError(f"expected {geom.cp} slots, got {len(ids)}")
    raw = b"".join(i.to_bytes(geom.id_bytes, "big") for i in ids)
    return raw + b"\x00" * (BLOCK_BYTES - len(raw))


def unpack_ids(block: bytes, geom: BlockGeometry) -> list[int]:
    w = geom.id_bytes
    return [int.from_bytes(block[x * w:(x + 1) * w], "big") for x in range(geom.cp)]


def bits_from_blocks(blocks: list[bytes], n: int) -> set[int]:
    """Set bit positions (1-based, capped at n) across ordered bit-vector blocks."""
    out: set[int] = set()
    for bnum, block in enumerate(blocks):
        base = bnum * KAPPA
        v = int.from_bytes(block, "big")
        while v:
            low = v & -v
            pos = KAPPA - low.bit_length() + 1
            doc = base + pos
            if doc <= n:
                out.add(doc)
            v ^= low
    return out


def encrypt_entry_basic(keyword: str, payload: PlainPayload, ring: KeyRing,
                        oracle: RandomOracle, geom: BlockGeometry) -> EncryptedEntry:
    """Basic-scheme entry: every block masked under the keyword's payload key."""
    key = derive_oracle_key(ring.k_p, keyword)
    blocks = [
        EncryptedBlock(j, payload.kind, xor_bytes(raw, oracle.output(key, j)))
        for j, raw in enumerate(split_blocks(payload, geom), start=1)
    ]
    return EncryptedEntry(prf_tag(ring.k_t, keyword), payload.kind, blocks)


def encrypt_list_block_auth(block: bytes, slot_groups: list[str], keyword: str,
                            ring: KeyRing, oracle: RandomOracle,
                            geom: BlockGeometry, j: int) -> bytes:
    """Mask each identifier slot with its group's oracle-output window."""
    if len(slot_groups) != geom.cp:
        raise BlockError("one group per slot required")
    w = geom.id_bytes
    out = bytearray(block)
    masks: dict[str, bytes] = {}
    for x, group in enumerate(slot_groups):
        if group not in masks:
            masks[group] = oracle.output(derive_oracle_key(ring.group_index_key(group), keyword), j)
        window = masks[group][x * w:(x + 1) * w]
        out[x * w:(x + 1) * w] = xor_bytes(block[x * w:(x + 1) * w], window)
    return bytes(out)


def encrypt_bitvec_block_auth(block: bytes, bit_groups: dict[str, int], keyword: str,
                              ring: KeyRing, oracle: RandomOracle, j: int,
                              tail_selector: int = 0) -> bytes:
    """Group-oriented bit selection over per-group masked copies.

    ``bit_groups`` maps each group to a kappa-bit selector int (MSB = slot 1)
    marking which bit positions that group's documents occupy in this block;
    ``tail_selector`` marks padding bits past n, masked under a reserved key.
    """
    acc = 0
    plain = int.from_bytes(block, "big")
    for group, selector in bit_groups.items():
        key = derive_oracle_key(ring.group_index_key(group), keyword)
        masked = plain ^ int.from_bytes(oracle.output(key, j), "big")
        acc |= masked & selector
    if tail_selector:
        masked = plain ^ int.from_bytes(oracle.output(ring.tail_group_key(keyword), j), "big")
        acc |= masked & tail_selector
    return acc.to_bytes(BLOCK_BYTES, "big")


def encrypt_owner_block(block: bytes, keyword: str, ring: KeyRing,
                        oracle: RandomOracle, j: int) -> bytes:
    return xor_bytes(block, oracle.output(derive_oracle_key(ring.k_o, keyword), j))


def bit_selectors(block_num: int, n: int, group_of: dict[int, str],
                  geom: BlockGeometry) -> tuple[dict[str, int], int]:
    """Per-group bit-selector ints plus the tail selector for one bitvec block."""
    base = (block_num - 1) * geom.kappa
    sel: dict[str, int] = {}
    tail = 0
    for slot in range(1, geom.kappa + 1):
        doc = base + slot
        bit = 1 << (geom.kappa - slot)
        if doc <= n:
            g = group_of[doc]
            sel[g] = sel.get(g, 0) | bit
        else:
            tail |= bit
    return sel, tail


def encrypt_entry_auth(keyword: str, payload: PlainPayload, group_of: dict[int, str],
                       ring: KeyRing, oracle: RandomOracle, geom: BlockGeometry,
                       rng: random.Random) -> EncryptedEntry:
    """Authorization-aware entry: per-group user parts plus an owner part.

    Fake list slots (id 0) are masked under a uniformly drawn real group so
    they are indistinguishable from occupied slots; they decrypt to 0 and fail
    the range check.
    """
    groups_sorted = sorted({g for g in group_of.values()})
    plain_blocks = split_blocks(payload, geom)
    out: list[EncryptedBlock] = []
    for j, raw in enumerate(plain_blocks, start=1):
        if payload.kind is PayloadKind.IDLIST:
            slot_ids = unpack_ids(raw, geom)
            slot_groups = [group_of[i] if i else rng.choice(groups_sorted) for i in slot_ids]
            user = encrypt_list_block_auth(raw, slot_groups, keyword, ring, oracle, geom, j)
        else:
            sel, tail = bit_selectors(j, payload.n, group_of, geom)
            user = encrypt_bitvec_block_auth(raw, sel, keyword, ring, oracle, j, tail)
        owner = encrypt_owner_block(raw, keyword, ring, oracle, j)
        out.append(EncryptedBlock(j, payload.kind, user, owner))
    return EncryptedEntry(prf_tag(ring.k_t, keyword), payload.kind, out)
