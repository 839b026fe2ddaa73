"""Documents, keyword extraction, group assignment, and the plain inverted index."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

Tokenizer = Callable[[str], "set[str]"]

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")

DEFAULT_GROUP = "G1"


class CorpusError(ValueError):
    """Malformed corpus: duplicate ids/names, unknown groups, bad encoding."""


def default_tokenizer(text: str) -> set[str]:
    """Lowercase, split on non-alphanumerics, drop tokens shorter than 2 chars."""
    return {t for t in _TOKEN_SPLIT.split(text.lower()) if len(t) >= 2}


def extract_keywords(body: bytes, tokenizer: Tokenizer = default_tokenizer,
                     encoding: str = "utf-8") -> set[str]:
    """Deterministic, duplicate-free keyword set of a document body.

    Raises CorpusError if the body is not valid text in the given encoding.
    """
    try:
        text = body.decode(encoding)
    except UnicodeDecodeError as exc:
        raise CorpusError(f"document body is not valid {encoding}: {exc}") from exc
    return tokenizer(text)


@dataclass(frozen=True)
class Document:
    doc_id: int
    name: str
    body: bytes
    group: str = DEFAULT_GROUP

    def __post_init__(self):
        if self.doc_id < 1:
            raise CorpusError(f"doc_id must be >= 1, got {self.doc_id}")


@dataclass
class Corpus:
    """A setup document collection with dense ids 1..n and its group universe."""

    documents: list[Document] = field(default_factory=list)

    def __post_init__(self):
        ids = [d.doc_id for d in self.documents]
        if len(set(ids)) != len(ids):
            raise CorpusError("duplicate doc_id in corpus")
        names = [d.name for d in self.documents]
        if len(set(names)) != len(names):
            raise CorpusError("duplicate document name in corpus")

    @property
    def n(self) -> int:
        return len(self.documents)

    @property
    def groups(self) -> set[str]:
        return {d.group for d in self.documents}

    def by_id(self, doc_id: int) -> Document:
        for d in self.documents:
            if d.doc_id == doc_id:
                return d
        raise KeyError(doc_id)

    def group_map(self) -> dict[int, str]:
        return {d.doc_id: d.group for d in self.documents}


def make_corpus(bodies: Iterable[tuple[str, bytes, str]]) -> Corpus:
    """Build a setup corpus from (name, body, group) triples; ids assigned 1..n."""
    docs = [Document(i + 1, name, body, group)
            for i, (name, body, group) in enumerate(bodies)]
    return Corpus(docs)


@dataclass
class InvertedIndex:
    """keyword -> strictly ascending list of doc ids."""

    entries: dict[str, list[int]] = field(default_factory=dict)

    @property
    def z(self) -> int:
        return len(self.entries)

    def keywords(self) -> list[str]:
        return sorted(self.entries)

    def postings(self, keyword: str) -> list[int]:
        return self.entries.get(keyword, [])


def build_inverted_index(corpus: Corpus, tokenizer: Tokenizer = default_tokenizer) -> InvertedIndex:
    """Form the keyword -> sorted id-list map over the setup corpus.

    Setup ids must be dense 1..n; membership follows extract_keywords exactly.
    """
    ids = sorted(d.doc_id for d in corpus.documents)
    if ids != list(range(1, corpus.n + 1)):
        raise CorpusError("setup corpus ids must be dense 1..n")
    entries: dict[str, list[int]] = {}
    for doc in sorted(corpus.documents, key=lambda d: d.doc_id):
        for kw in extract_keywords(doc.body, tokenizer):
            entries.setdefault(kw, []).append(doc.doc_id)
    return InvertedIndex(entries)


def load_corpus_dir(directory: str | Path, group_file: str | Path | None = None) -> Corpus:
    """Ingest a directory of files: filename = document name, ids in sorted-name order.

    An optional sidecar file assigns groups, one ``name<TAB>group`` line per
    document; documents without a line default to group G1.
    """
    directory = Path(directory)
    groups: dict[str, str] = {}
    if group_file is not None:
        for line_no, line in enumerate(Path(group_file).read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusError(f"{group_file}:{line_no}: expected name<TAB>group")
            groups[parts[0]] = parts[1]
    files = sorted(p for p in directory.iterdir() if p.is_file())
    triples = [(p.name, p.read_bytes(), groups.get(p.name, DEFAULT_GROUP)) for p in files]
    return make_corpus(triples)
