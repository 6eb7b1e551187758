"""Target-translation ingestion: verse identity, TSV Bibles, coverage filtering.

A translation is a TSV file with four tab-separated columns: book, chapter,
verse, text.  The verse column is either a single number ("35") or a combined
range ("16-17") when the translators fused several verses into one unit with
no internal boundary.  Combined verses are ingested but are unusable for
projection and never count toward coverage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable


class IngestionError(ValueError):
    """A translation TSV or book code could not be ingested."""


def _load_book_codes() -> tuple[dict[str, str], dict[str, int]]:
    aliases: dict[str, str] = {}
    order: dict[str, int] = {}
    data = resources.files(__package__).joinpath("data/book_codes.tsv").read_text("utf-8")
    for line in data.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        alias, canonical = line.split("\t")
        aliases[alias] = canonical
        if canonical not in order:
            order[canonical] = len(order)
    return aliases, order


BOOK_ALIASES, BOOK_ORDER = _load_book_codes()


def canonical_book(code: str) -> str:
    """Map a book name or code to its canonical three-letter code."""
    key = code.strip().upper()
    try:
        return BOOK_ALIASES[key]
    except KeyError:
        raise IngestionError(f"unknown book code: {code!r}") from None


@dataclass(frozen=True)
class VerseLabel:
    """Identity of a verse: book, chapter, and a verse number or fused range."""

    book: str
    chapter: int
    verse_lo: int
    verse_hi: int

    def __post_init__(self) -> None:
        if self.chapter < 1 or self.verse_lo < 1:
            raise ValueError(f"chapter and verse must be >= 1: {self}")
        if self.verse_hi < self.verse_lo:
            raise ValueError(f"inverted verse range: {self}")

    @classmethod
    def simple(cls, book: str, chapter: int, verse: int) -> "VerseLabel":
        return cls(book, chapter, verse, verse)

    @classmethod
    def parse(cls, text: str) -> "VerseLabel":
        """Parse "JHN 11:35" or "ACT 1:16-17"."""
        try:
            book, rest = text.strip().split(" ", 1)
            chapter_s, verse_s = rest.split(":", 1)
        except ValueError:
            raise IngestionError(f"malformed verse label: {text!r}") from None
        return parse_verse_label(book, chapter_s, verse_s)

    @property
    def is_combined(self) -> bool:
        return self.verse_hi > self.verse_lo

    def verses(self) -> Iterable[int]:
        return range(self.verse_lo, self.verse_hi + 1)

    def sort_key(self) -> tuple[int, str, int, int, int]:
        # Unknown books sort after canonical ones, alphabetically.
        return (BOOK_ORDER.get(self.book, len(BOOK_ORDER)), self.book,
                self.chapter, self.verse_lo, self.verse_hi)

    def __str__(self) -> str:
        if self.is_combined:
            return f"{self.book} {self.chapter}:{self.verse_lo}-{self.verse_hi}"
        return f"{self.book} {self.chapter}:{self.verse_lo}"


def parse_verse_label(book: str, chapter: str, verse_field: str) -> VerseLabel:
    """Build a VerseLabel from raw TSV fields; verse_field is "N" or "N-M"."""
    canonical = canonical_book(book)
    try:
        chapter_no = int(chapter)
    except ValueError:
        raise IngestionError(f"non-integer chapter: {chapter!r}") from None
    lo_s, sep, hi_s = verse_field.strip().partition("-")
    try:
        lo = int(lo_s)
        hi = int(hi_s) if sep else lo
    except ValueError:
        raise IngestionError(f"malformed verse field: {verse_field!r}") from None
    if chapter_no < 1 or lo < 1:
        raise IngestionError(f"chapter and verse must be >= 1: {book} {chapter}:{verse_field}")
    if hi < lo or (sep and hi == lo):
        raise IngestionError(f"invalid verse range: {verse_field!r}")
    return VerseLabel(canonical, chapter_no, lo, hi)


@dataclass(frozen=True)
class VerseText:
    """One translated verse: its label plus the (stripped, non-empty) text."""

    label: VerseLabel
    text: str

    def __post_init__(self) -> None:
        if not self.text or self.text != self.text.strip():
            raise ValueError(f"verse text must be stripped and non-empty: {self.label}")


@dataclass
class Bible:
    """An ingested translation with an integer-verse lookup index."""

    translation_id: str
    verses: list[VerseText] = field(default_factory=list)
    index: dict[tuple[str, int, int], int] = field(default_factory=dict)
    skipped_empty: int = 0

    def position(self, book: str, chapter: int, verse: int) -> int | None:
        return self.index.get((book, chapter, verse))

    def verse_at(self, book: str, chapter: int, verse: int) -> VerseText | None:
        pos = self.position(book, chapter, verse)
        return None if pos is None else self.verses[pos]

    def text_for(self, label: VerseLabel) -> str | None:
        """Text of the target verse covering `label`, or None if absent."""
        entry = self.verse_at(label.book, label.chapter, label.verse_lo)
        return None if entry is None else entry.text


def parse_bible_tsv(text: str, translation_id: str) -> Bible:
    """Ingest a 4-column translation TSV (book, chapter, verse, text).

    Lines starting with "#" are comments.  A leading header line is detected
    by a non-integer chapter field.  Empty-text lines are skipped and counted
    in Bible.skipped_empty.  Overlapping verse ranges are an error.
    """
    bible = Bible(translation_id)
    claimed: dict[tuple[str, int, int], int] = {}  # integer verse -> line number
    first_data_line = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t", 3)
        if len(fields) == 3:
            fields.append("")  # trailing tab lost on an empty text field
        if len(fields) != 4:
            raise IngestionError(f"line {lineno}: expected 4 tab-separated fields, got {len(fields)}")
        book_s, chapter_s, verse_s, verse_text = fields
        if first_data_line and not chapter_s.strip().isdigit():
            first_data_line = False  # header row
            continue
        first_data_line = False
        label = parse_verse_label(book_s, chapter_s, verse_s)
        if not verse_text.strip():
            bible.skipped_empty += 1
            continue
        for v in label.verses():
            key = (label.book, label.chapter, v)
            if key in claimed:
                raise IngestionError(
                    f"line {lineno}: verse {label.book} {label.chapter}:{v} "
                    f"already covered by line {claimed[key]}")
        pos = len(bible.verses)
        bible.verses.append(VerseText(label, verse_text.strip()))
        for v in label.verses():
            key = (label.book, label.chapter, v)
            claimed[key] = lineno
            bible.index[key] = pos
    return bible


def serialize_bible_tsv(bible: Bible) -> str:
    """Inverse of parse_bible_tsv (modulo comments and skipped lines)."""
    lines = []
    for entry in bible.verses:
        label = entry.label
        verse_field = (f"{label.verse_lo}-{label.verse_hi}" if label.is_combined
                       else str(label.verse_lo))
        lines.append(f"{label.book}\t{label.chapter}\t{verse_field}\t{entry.text}")
    return "\n".join(lines) + ("\n" if lines else "")


def coverage_check(bible: Bible, reference: set[VerseLabel],
                   threshold: int = 500) -> tuple[int, bool]:
    """Count reference verses usably covered by the bible.

    A reference verse counts only if the covering target verse is simple;
    combined target verses are unusable for projection.
    """
    overlap = 0
    for ref in reference:
        entry = bible.verse_at(ref.book, ref.chapter, ref.verse_lo)
        if entry is not None and not entry.label.is_combined:
            overlap += 1
    return overlap, overlap >= threshold
