"""Associate source sentences with verses and classify each verse's usability.

A source verse is usable when it is a simple (non-fused) verse, every sentence
mapped to it lies wholly inside it, and the target translation has a simple
verse with the same book/chapter/verse identity.  All other verses keep a
status naming why they were set aside; the five task generators consume only
the usable ones.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .onf import OnfDocument
from .scripture import Bible, IngestionError, VerseLabel, canonical_book

SentenceId = tuple[str, int]  # (doc_id, sentence index)


class AlignmentError(ValueError):
    """A sentence could not be associated with a verse."""


class VerseStatus(Enum):
    USABLE = "usable"
    CROSS_VERSE = "cross_verse"
    COMBINED_SOURCE = "combined_source"
    COMBINED_TARGET = "combined_target"
    MISSING_TARGET = "missing_target"


@dataclass
class SentenceVerseMap:
    """Maps each sentence to the 1 or 2 verse labels it lies in."""

    entries: dict[SentenceId, list[VerseLabel]] = field(default_factory=dict)

    def add(self, sid: SentenceId, labels: list[VerseLabel]) -> None:
        if not 1 <= len(labels) <= 2:
            raise AlignmentError(f"sentence {sid}: mapped to {len(labels)} verses")
        if len(labels) == 2:
            first, second = labels
            if (first.is_combined or second.is_combined
                    or first.book != second.book or first.chapter != second.chapter
                    or second.verse_lo != first.verse_lo + 1):
                raise AlignmentError(
                    f"sentence {sid}: cross-verse mapping must name consecutive "
                    f"simple verses, got {first} / {second}")
        self.entries[sid] = labels

    def merge(self, other: "SentenceVerseMap") -> None:
        for sid, labels in other.entries.items():
            self.add(sid, labels)


@dataclass
class ExtractorConfig:
    """Selects how sentence-to-verse metadata is obtained.

    The sidecar file is the normative path; the leading-verse-number heuristic
    is a convenience for corpora that keep verse numbers as sentence-initial
    tokens.
    """

    sidecar: dict[SentenceId, list[VerseLabel]] | None = None
    use_heuristic: bool = False


def read_sidecar(text: str) -> dict[SentenceId, list[VerseLabel]]:
    """Parse sidecar TSV rows: doc_id, sentence index, ";"-separated labels."""
    mapping: dict[SentenceId, list[VerseLabel]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise AlignmentError(f"sidecar line {lineno}: expected 3 fields")
        doc_id, index_s, labels_s = fields
        try:
            index = int(index_s)
        except ValueError:
            raise AlignmentError(f"sidecar line {lineno}: bad sentence index {index_s!r}") from None
        labels = [VerseLabel.parse(part) for part in labels_s.split(";") if part.strip()]
        if not labels:
            raise AlignmentError(f"sidecar line {lineno}: no verse labels")
        mapping[(doc_id, index)] = labels
    return mapping


_DOC_CHAPTER = re.compile(r"(?:^|/)([0-9A-Za-z]+)/(\d+)$")
_LEADING_VERSE = re.compile(r"^(\d+)(?:-(\d+))?$")


def _doc_book_chapter(doc_id: str) -> tuple[str, int]:
    match = _DOC_CHAPTER.search(doc_id)
    if not match:
        raise AlignmentError(f"doc {doc_id!r}: cannot read book/chapter from doc_id")
    try:
        book = canonical_book(match.group(1))
    except IngestionError as exc:
        raise AlignmentError(f"doc {doc_id!r}: {exc}") from None
    return book, int(match.group(2))


def assign_verses(doc: OnfDocument, config: ExtractorConfig) -> SentenceVerseMap:
    """Map every sentence of one document to its verse label(s).

    With a sidecar, each sentence is looked up directly.  Under the heuristic,
    a sentence whose first token is "k" or "k-m" starts that verse of the
    chapter encoded in the doc_id, and later sentences inherit the current
    verse.
    """
    svm = SentenceVerseMap()
    if config.sidecar is not None and not config.use_heuristic:
        for sentence in doc.sentences:
            sid = (doc.doc_id, sentence.index)
            labels = config.sidecar.get(sid)
            if labels is None:
                raise AlignmentError(f"sentence {sid}: no sidecar entry")
            svm.add(sid, labels)
        return svm

    book, chapter = _doc_book_chapter(doc.doc_id)
    current: VerseLabel | None = None
    for sentence in doc.sentences:
        sid = (doc.doc_id, sentence.index)
        match = _LEADING_VERSE.match(sentence.tokens[0][0])
        if match:
            lo = int(match.group(1))
            hi = int(match.group(2)) if match.group(2) else lo
            current = VerseLabel(book, chapter, lo, hi)
        if config.sidecar is not None and sid in config.sidecar:
            # Sidecar entries override; they mark boundary-crossing sentences
            # the heuristic cannot see.
            labels = config.sidecar[sid]
            svm.add(sid, labels)
            current = labels[-1]
            continue
        if current is None:
            raise AlignmentError(
                f"sentence {sid}: no leading verse number and no sidecar entry")
        svm.add(sid, [current])
    return svm


@dataclass
class AlignmentRow:
    sentence_ids: list[SentenceId]
    status: VerseStatus


@dataclass
class AlignmentTable:
    """Per simple source verse: its sentences and usability status."""

    rows: dict[VerseLabel, AlignmentRow] = field(default_factory=dict)

    def status_counts(self) -> dict[str, int]:
        counts = {status.value: 0 for status in VerseStatus}
        for row in self.rows.values():
            counts[row.status.value] += 1
        return counts


def build_alignment(svm: SentenceVerseMap, source_combined: set[VerseLabel],
                    target: Bible) -> AlignmentTable:
    """Assign every simple source verse a status and its sentence list."""
    combined_ints: set[tuple[str, int, int]] = set()
    for label in source_combined:
        for v in label.verses():
            combined_ints.add((label.book, label.chapter, v))
    for labels in svm.entries.values():
        for label in labels:
            if label.is_combined:
                for v in label.verses():
                    combined_ints.add((label.book, label.chapter, v))

    sentences_by_verse: dict[VerseLabel, list[SentenceId]] = {}
    crossing: set[VerseLabel] = set()
    for sid, labels in svm.entries.items():
        for label in labels:
            for v in label.verses():
                simple = VerseLabel.simple(label.book, label.chapter, v)
                sentences_by_verse.setdefault(simple, []).append(sid)
                if len(labels) == 2:
                    crossing.add(simple)

    table = AlignmentTable()
    for verse in sorted(sentences_by_verse, key=VerseLabel.sort_key):
        key = (verse.book, verse.chapter, verse.verse_lo)
        target_entry = target.verse_at(*key)
        if key in combined_ints:
            status = VerseStatus.COMBINED_SOURCE
        elif target_entry is not None and target_entry.label.is_combined:
            status = VerseStatus.COMBINED_TARGET
        elif target_entry is None:
            status = VerseStatus.MISSING_TARGET
        elif verse in crossing:
            status = VerseStatus.CROSS_VERSE
        else:
            status = VerseStatus.USABLE
        sentence_ids = sorted(set(sentences_by_verse[verse]))
        table.rows[verse] = AlignmentRow(sentence_ids, status)
    return table


def usable_verses(table: AlignmentTable) -> list[VerseLabel]:
    """The usable rows, in canonical book/chapter/verse order."""
    return sorted((verse for verse, row in table.rows.items()
                   if row.status is VerseStatus.USABLE), key=VerseLabel.sort_key)
