"""Key material, PRFs, programmable random oracles, and document encryption.

All primitives are instantiated from HMAC-SHA256 over domain-separated inputs.
The two random oracles (one masking search-index blocks, one masking
update-index cells) support a programmed-table mode in which specific
(key, input) pairs are pinned to chosen outputs; the leakage simulator uses
this to rebuild a view from the trace alone.
"""

from __future__ import annotations

import hmac
import secrets
from dataclasses import dataclass, field
from pathlib import Path

KAPPA = 256            # oracle output bits
KEY_BYTES = 32
DOC_NONCE_BYTES = 16
DOC_MAC_BYTES = 16
DOC_HEADER_BYTES = DOC_NONCE_BYTES + DOC_MAC_BYTES


class CryptoError(Exception):
    pass


class DecryptionError(CryptoError):
    """Ciphertext failed its integrity check (wrong key or corruption)."""


def _expand(key: bytes, msg: bytes, nbytes: int) -> bytes:
    """Deterministic HMAC-SHA256 expansion of (key, msg) to nbytes."""
    if nbytes <= 32:
        return hmac.digest(key, msg + b"\x00", "sha256")[:nbytes]
    out = bytearray()
    ctr = 0
    while len(out) < nbytes:
        out += hmac.digest(key, msg + bytes([ctr]), "sha256")
        ctr += 1
    return bytes(out[:nbytes])


def prf(key: bytes, label: bytes, data: bytes) -> bytes:
    """256-bit PRF output for a domain-separated input."""
    return hmac.digest(key, label + b"|" + data, "sha256")


def prf_tag(k_t: bytes, keyword: str) -> bytes:
    """Deterministic 256-bit keyword tag."""
    if not keyword:
        raise ValueError("empty keyword")
    return prf(k_t, b"tag", keyword.encode("utf-8"))


def derive_oracle_key(key: bytes, keyword: str) -> bytes:
    """Per-keyword oracle key under a payload, owner, or group key."""
    if not keyword:
        raise ValueError("empty keyword")
    return prf(key, b"okey", keyword.encode("utf-8"))


def doc_tag(k_d: bytes, name: str) -> bytes:
    """Deterministic update-index row tag for a document name."""
    return prf(k_d, b"doc", name.encode("utf-8"))


def doc_oracle_key(k_a: bytes, name: str) -> bytes:
    """Per-document cell-masking oracle key."""
    return prf(k_a, b"dkey", name.encode("utf-8"))


class RandomOracle:
    """Deterministic keyed oracle with an optional programmed table.

    In keyed-hash mode the output for (key, j) is an HMAC expansion of the
    domain-separated input.  Programmed entries are consulted first and
    override the hash for exactly the pairs the simulator pinned; everything
    else falls through unchanged.
    """

    def __init__(self, label: str):
        self.label = label.encode("ascii")
        self.kappa = KAPPA
        self._table: dict[tuple[bytes, int], bytes] = {}

    def output(self, key: bytes, j: int, nbytes: int = KAPPA // 8) -> bytes:
        if j < 1:
            raise ValueError(f"oracle input must be >= 1, got {j}")
        pinned = self._table.get((key, j))
        if pinned is not None:
            if len(pinned) < nbytes:
                raise CryptoError(
                    f"programmed {self.label.decode()} value too short: "
                    f"{len(pinned)} < {nbytes}")
            return pinned[:nbytes]
        return _expand(key, self.label + b"|" + j.to_bytes(8, "big"), nbytes)

    def program(self, key: bytes, j: int, value: bytes) -> None:
        """Pin the output for (key, j); conflicting re-pins are rejected."""
        prev = self._table.get((key, j))
        if prev is not None and prev != value:
            raise CryptoError(f"oracle {self.label.decode()} already programmed at input {j}")
        self._table[(key, j)] = value

    def programmed(self) -> int:
        return len(self._table)


@dataclass
class MaskedBlock:
    ciphertext: bytes
    index: int


def mask_block(block: bytes, oracle: RandomOracle, key: bytes, j: int) -> MaskedBlock:
    """XOR a kappa-bit block with the oracle output for (key, j)."""
    if len(block) != KAPPA // 8:
        raise ValueError(f"block must be {KAPPA // 8} bytes, got {len(block)}")
    return MaskedBlock(xor_bytes(block, oracle.output(key, j)), j)


def unmask_block(masked: MaskedBlock, oracle: RandomOracle, key: bytes) -> bytes:
    return xor_bytes(masked.ciphertext, oracle.output(key, masked.index, len(masked.ciphertext)))


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError(f"xor length mismatch: {len(a)} != {len(b)}")
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).to_bytes(len(a), "big")


@dataclass
class KeyRing:
    """All owner secrets.  Never shipped to the store side."""

    k_t: bytes            # keyword tags
    k_p: bytes            # payload oracle keys (basic scheme)
    k_o: bytes            # owner oracle keys (authorization mode)
    k_d: bytes            # document-name tags (update index)
    k_a: bytes            # cell oracle keys (update index)
    k_coll: bytes         # collection encryption (basic scheme)
    group_keys: dict[str, tuple[bytes, bytes]] = field(default_factory=dict)
    # group -> (index key K_G, collection key K_G^C)

    def group_index_key(self, group: str) -> bytes:
        try:
            return self.group_keys[group][0]
        except KeyError:
            raise CryptoError(f"no key material for group {group!r}") from None

    def group_coll_key(self, group: str) -> bytes:
        try:
            return self.group_keys[group][1]
        except KeyError:
            raise CryptoError(f"no key material for group {group!r}") from None

    def tail_group_key(self, keyword: str) -> bytes:
        """Masking key for bit-vector tail bits past n (a reserved group)."""
        return derive_oracle_key(prf(self.k_p, b"grp", b"__tail__"), keyword)


def keygen(groups: set[str] | list[str], seed: int | None = None) -> KeyRing:
    """Generate independent keys; with a seed the whole ring is deterministic."""
    if seed is None:
        fresh = lambda _label: secrets.token_bytes(KEY_BYTES)
    else:
        root = seed.to_bytes(16, "big", signed=False)
        fresh = lambda label: _expand(root, b"keygen|" + label, KEY_BYTES)
    ring = KeyRing(
        k_t=fresh(b"k_t"),
        k_p=fresh(b"k_p"),
        k_o=fresh(b"k_o"),
        k_d=fresh(b"k_d"),
        k_a=fresh(b"k_a"),
        k_coll=fresh(b"k_coll"),
    )
    for g in sorted(groups):
        ring.group_keys[g] = (fresh(b"kg|" + g.encode()), fresh(b"kgc|" + g.encode()))
    return ring


def encrypt_document(key: bytes, body: bytes, nonce: bytes | None = None) -> bytes:
    """Length-transparent stream encryption: |C| = |D| + fixed header.

    Layout: nonce(16) || mac(16) || body xor keystream.  The MAC covers the
    nonce and ciphertext; decryption with a wrong key fails loudly.
    """
    if nonce is None:
        nonce = secrets.token_bytes(DOC_NONCE_BYTES)
    if len(nonce) != DOC_NONCE_BYTES:
        raise ValueError("nonce must be 16 bytes")
    stream = _expand(key, b"docstream|" + nonce, max(1, len(body)))[: len(body)]
    ct = xor_bytes(body, stream) if body else b""
    mac = hmac.digest(key, b"docmac|" + nonce + ct, "sha256")[:DOC_MAC_BYTES]
    return nonce + mac + ct


def decrypt_document(key: bytes, blob: bytes) -> bytes:
    if len(blob) < DOC_HEADER_BYTES:
        raise DecryptionError("ciphertext shorter than header")
    nonce, mac, ct = (blob[:DOC_NONCE_BYTES],
                      blob[DOC_NONCE_BYTES:DOC_HEADER_BYTES],
                      blob[DOC_HEADER_BYTES:])
    want = hmac.digest(key, b"docmac|" + nonce + ct, "sha256")[:DOC_MAC_BYTES]
    if not hmac.compare_digest(mac, want):
        raise DecryptionError("document integrity check failed (wrong key?)")
    if not ct:
        return b""
    stream = _expand(key, b"docstream|" + nonce, len(ct))
    return xor_bytes(ct, stream)


def save_keyring(ring: KeyRing, path: str | Path) -> None:
    """Write the ring as labeled base-16 lines."""
    lines = []
    for label in ("k_t", "k_p", "k_o", "k_d", "k_a", "k_coll"):
        lines.append(f"{label} = {getattr(ring, label).hex()}")
    for g in sorted(ring.group_keys):
        idx, coll = ring.group_keys[g]
        lines.append(f"group.{g}.index = {idx.hex()}")
        lines.append(f"group.{g}.coll = {coll.hex()}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_keyring(path: str | Path) -> KeyRing:
    fields: dict[str, bytes] = {}
    groups: dict[str, dict[str, bytes]] = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            label, value = (p.strip() for p in line.split("=", 1))
            raw = bytes.fromhex(value)
        except ValueError as exc:
            raise CryptoError(f"{path}:{line_no}: bad key line") from exc
        if label.startswith("group."):
            _, g, part = label.split(".")
            groups.setdefault(g, {})[part] = raw
        else:
            fields[label] = raw
    try:
        ring = KeyRing(**{k: fields[k] for k in ("k_t", "k_p", "k_o", "k_d", "k_a", "k_coll")})
    except KeyError as exc:
        raise CryptoError(f"key file {path} missing entry {exc}") from None
    for g, parts in groups.items():
        ring.group_keys[g] = (parts["index"], parts["coll"])
    return ring
