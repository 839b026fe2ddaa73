"""Encrypted, frequency-hiding inverted index with region-partitioned search.

The package builds a keyword index over a document corpus, hides keyword
frequencies behind fixed-size payloads, encrypts everything with keyed-hash
masking, stripes the encrypted blocks across simulated region servers, and
supports authorized multi-user search plus secure deletion/addition.  A
leakage auditor replays operation histories and checks that the server
observes exactly the declared trace, via a programmable-oracle simulator.
"""

from .corpus import Corpus, Document, InvertedIndex, default_tokenizer
from .payload import StorageParams, PlainPayload, optimal_upsilon
from .crypto import KeyRing, RandomOracle, keygen
from .engine import SseEngine, EngineParams, User, OWNER

__all__ = [
    "Corpus",
    "Document",
    "InvertedIndex",
    "default_tokenizer",
    "StorageParams",
    "PlainPayload",
    "optimal_upsilon",
    "KeyRing",
    "RandomOracle",
    "keygen",
    "SseEngine",
    "EngineParams",
    "User",
    "OWNER",
]
