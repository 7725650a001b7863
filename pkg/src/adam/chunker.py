"""Overlapping fixed-window text segmentation.

A text of length L is cut into windows of s characters whose starts
advance by the stride s - o, so consecutive windows share o characters:

    p_i = 1 + (i - 1) * (s - o)          (1-based start of segment i)
    n   = max(1, ceil((L - o) / (s - o)))  (number of segments)

Every segment except possibly the last has exactly s characters; the
last is truncated at L and never padded. Removing the first o
characters of every segment after the first and concatenating restores
the original text exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyInputError, FormatError, WindowError

DEFAULT_SEGMENT_LENGTH = 2000
DEFAULT_OVERLAP = 400


@dataclass(frozen=True)
class Chunk:
    """One segment of a publication's text."""

    publication_id: str
    segment_index: int  # 1-based
    start: int  # 1-based character offset into the source text
    text: str
    topic_keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class CorpusDocument:
    """One publication read from a JSONL corpus file."""

    publication_id: str
    title: str
    text: str
    keywords: tuple[str, ...] = ()


def _check_window(segment_length: int, overlap: int) -> None:
    if segment_length < 1:
        raise WindowError(f"segment length must be >= 1, got {segment_length}")
    if not 0 <= overlap < segment_length:
        raise WindowError(
            f"overlap must satisfy 0 <= overlap < segment length, "
            f"got overlap={overlap}, segment length={segment_length}"
        )


def segment_start(index: int,
                  segment_length: int = DEFAULT_SEGMENT_LENGTH,
                  overlap: int = DEFAULT_OVERLAP) -> int:
    """1-based start position of the 1-based ``index``-th segment."""
    _check_window(segment_length, overlap)
    if index < 1:
        raise ValueError(f"segment index is 1-based, got {index}")
    return 1 + (index - 1) * (segment_length - overlap)


def segment_count(text_length: int,
                  segment_length: int = DEFAULT_SEGMENT_LENGTH,
                  overlap: int = DEFAULT_OVERLAP) -> int:
    """Number of windows covering a text of ``text_length`` characters.

    Texts no longer than the overlap still need one segment, hence the
    max(1, ...) guard.
    """
    _check_window(segment_length, overlap)
    if text_length < 1:
        raise EmptyInputError(f"text length must be >= 1, got {text_length}")
    return max(1, math.ceil((text_length - overlap) / (segment_length - overlap)))


def segment_text(text: str,
                 segment_length: int = DEFAULT_SEGMENT_LENGTH,
                 overlap: int = DEFAULT_OVERLAP,
                 publication_id: str = "",
                 keywords: tuple[str, ...] = ()) -> list[Chunk]:
    """Cut ``text`` into overlapping chunks.

    :param text: source text; must be non-empty.
    :param segment_length: window size s in characters.
    :param overlap: shared prefix length o between consecutive windows.
    :param publication_id: carried onto every chunk.
    :param keywords: topic keywords carried onto every chunk.
    :returns: list of exactly segment_count(len(text), s, o) chunks.
    """
    _check_window(segment_length, overlap)
    if not text:
        raise EmptyInputError("cannot segment an empty text")
    n = segment_count(len(text), segment_length, overlap)
    chunks = []
    for i in range(1, n + 1):
        start = segment_start(i, segment_length, overlap)
        piece = text[start - 1:start - 1 + segment_length]
        chunks.append(Chunk(publication_id=publication_id,
                            segment_index=i,
                            start=start,
                            text=piece,
                            topic_keywords=tuple(keywords)))
    return chunks


def reconstruct(chunks: list[Chunk], overlap: int = DEFAULT_OVERLAP) -> str:
    """Invert segment_text: drop each non-initial chunk's overlap prefix."""
    if not chunks:
        raise EmptyInputError("cannot reconstruct from zero chunks")
    ordered = sorted(chunks, key=lambda c: c.segment_index)
    parts = [ordered[0].text]
    parts.extend(c.text[overlap:] for c in ordered[1:])
    return "".join(parts)


def read_corpus(path: str | Path) -> list[CorpusDocument]:
    """Read a JSONL corpus: one object per line with keys
    publication_id, text, and optionally title and keywords.
    """
    docs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise FormatError(f"{path}: line {lineno}: expected an object")
            pub = obj.get("publication_id")
            text = obj.get("text")
            if not pub or not isinstance(pub, str):
                raise FormatError(f"{path}: line {lineno}: missing publication_id")
            if not text or not isinstance(text, str):
                raise FormatError(f"{path}: line {lineno}: missing or empty text")
            if pub in seen:
                raise FormatError(f"{path}: line {lineno}: duplicate publication_id {pub!r}")
            seen.add(pub)
            keywords = obj.get("keywords", [])
            if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
                raise FormatError(f"{path}: line {lineno}: keywords must be a list of strings")
            docs.append(CorpusDocument(publication_id=pub,
                                       title=str(obj.get("title", "")),
                                       text=text,
                                       keywords=tuple(keywords)))
    return docs
