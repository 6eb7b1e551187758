"""Rebuild mention-count and subject labels from dependency parses and
measure agreement against the projected labels.

Neither label source is ground truth, so reports also compare each side
against a seeded random baseline.
"""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass, field

from .scripture import VerseLabel
from .tasks import Task


class ConlluParseError(ValueError):
    """A dependency file is malformed."""


@dataclass(frozen=True)
class UdToken:
    id: int
    form: str
    upos: str
    head: int
    deprel: str


@dataclass
class UdSentence:
    tokens: list[UdToken] = field(default_factory=list)

    def roots(self) -> list[UdToken]:
        return [tok for tok in self.tokens if tok.head == 0]

    def children_of(self) -> dict[int, list[UdToken]]:
        children: dict[int, list[UdToken]] = {}
        for tok in self.tokens:
            children.setdefault(tok.head, []).append(tok)
        return children

    def descendants(self, token: UdToken) -> list[UdToken]:
        children = self.children_of()
        out: list[UdToken] = []
        queue = deque([token])
        while queue:
            node = queue.popleft()
            for child in sorted(children.get(node.id, []), key=lambda t: t.id):
                out.append(child)
                queue.append(child)
        return out


_ID_RANGE = re.compile(r"^\d+-\d+$")
_ID_EMPTY = re.compile(r"^\d+\.\d+$")


def _validate(sentence: UdSentence, ordinal: int) -> None:
    ids = {tok.id for tok in sentence.tokens}
    if not sentence.roots():
        raise ConlluParseError(f"sentence {ordinal}: no root token")
    for tok in sentence.tokens:
        if tok.head != 0 and tok.head not in ids:
            raise ConlluParseError(
                f"sentence {ordinal}: token {tok.id} has dangling head {tok.head}")
    by_id = {tok.id: tok for tok in sentence.tokens}
    for tok in sentence.tokens:
        seen = set()
        node = tok
        while node.head != 0:
            if node.id in seen:
                raise ConlluParseError(
                    f"sentence {ordinal}: cyclic heads involving token {tok.id}")
            seen.add(node.id)
            node = by_id[node.head]


def parse_conllu(text: str) -> list[UdSentence]:
    """Read blank-line-delimited 10-column dependency blocks.

    Comment lines, multiword-token ranges and empty nodes are skipped;
    syntactic words are kept.
    """
    sentences: list[UdSentence] = []
    current = UdSentence()

    def flush() -> None:
        nonlocal current
        if current.tokens:
            _validate(current, len(sentences))
            sentences.append(current)
            current = UdSentence()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 10:
            raise ConlluParseError(f"line {lineno}: expected 10 columns, got {len(fields)}")
        if _ID_RANGE.match(fields[0]) or _ID_EMPTY.match(fields[0]):
            continue
        try:
            token_id = int(fields[0])
            head = int(fields[6])
        except ValueError:
            raise ConlluParseError(f"line {lineno}: bad id or head field") from None
        current.tokens.append(UdToken(token_id, fields[1], fields[3], head, fields[7]))
    flush()
    return sentences


def ud_nmc(verse: list[UdSentence], cap: int = 3) -> int:
    """Mention count from POS tags: PROPN or NOUN tokens, skipping NOUN
    compound modifiers; capped."""
    count = 0
    for sentence in verse:
        for tok in sentence.tokens:
            if tok.upos not in ("PROPN", "NOUN"):
                continue
            if tok.upos == "NOUN" and tok.deprel.split(":")[0] == "compound":
                continue
            count += 1
    return min(count, cap)


def ud_pns(verse: list[UdSentence]) -> int:
    """Subject-contains-proper-noun from the verse's first sentence.

    Breadth-first from the root (ties by token id) to the first nsubj token;
    positive iff it or any descendant is tagged PROPN.  No subject means
    negative.
    """
    if not verse:
        return 0
    sentence = verse[0]
    children = sentence.children_of()
    level = sorted(sentence.roots(), key=lambda t: t.id)
    subject: UdToken | None = None
    while level and subject is None:
        for node in level:
            if node.deprel == "nsubj":
                subject = node
                break
        else:
            level = sorted((child for node in level
                            for child in children.get(node.id, [])),
                           key=lambda t: t.id)
    if subject is None:
        return 0
    if subject.upos == "PROPN":
        return 1
    return int(any(tok.upos == "PROPN" for tok in sentence.descendants(subject)))


@dataclass
class AgreementReport:
    n: int
    accuracy: float
    mse: float | None = None
    jaccard: float | None = None


def agreement(a: list[int], b: list[int], task: Task) -> AgreementReport:
    """Accuracy between aligned label vectors, plus MSE for mention counting
    and Jaccard over positives for the subject task."""
    if len(a) != len(b):
        raise ValueError(f"label vectors differ in length: {len(a)} vs {len(b)}")
    n = len(a)
    accuracy = sum(1 for x, y in zip(a, b) if x == y) / n if n else 1.0
    mse = jaccard = None
    if task is Task.NMC:
        mse = sum((x - y) ** 2 for x, y in zip(a, b)) / n if n else 0.0
    if task is Task.PNS:
        pos_a = {i for i, x in enumerate(a) if x == 1}
        pos_b = {i for i, y in enumerate(b) if y == 1}
        union = pos_a | pos_b
        jaccard = len(pos_a & pos_b) / len(union) if union else 1.0
    return AgreementReport(n=n, accuracy=accuracy, mse=mse, jaccard=jaccard)


LABEL_SPACES = {Task.NMC: (0, 1, 2, 3), Task.PNS: (0, 1)}


def random_annotations(task: Task, n: int, seed: int) -> list[int]:
    """Uniform labels over the task's space from a seeded generator."""
    space = LABEL_SPACES[task]
    rng = random.Random(seed)
    return [rng.choice(space) for _ in range(n)]


def read_ud_sidecar(text: str) -> dict[int, VerseLabel]:
    """Sidecar TSV mapping sentence ordinal (0-based) to verse label."""
    mapping: dict[int, VerseLabel] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ConlluParseError(f"sidecar line {lineno}: expected 2 fields")
        mapping[int(fields[0])] = VerseLabel.parse(fields[1])
    return mapping


def group_by_verse(sentences: list[UdSentence],
                   sidecar: dict[int, VerseLabel]) -> dict[VerseLabel, list[UdSentence]]:
    """Bucket parsed sentences into verses using the ordinal sidecar."""
    verses: dict[VerseLabel, list[UdSentence]] = {}
    for ordinal, sentence in enumerate(sentences):
        label = sidecar.get(ordinal)
        if label is None:
            raise ConlluParseError(f"sentence ordinal {ordinal} missing from sidecar")
        verses.setdefault(label, []).append(sentence)
    return verses


def ud_labels(verses: dict[VerseLabel, list[UdSentence]], task: Task,
              cap: int = 3) -> dict[VerseLabel, int]:
    """Task labels per verse reconstructed from dependency parses."""
    if task is Task.NMC:
        return {v: ud_nmc(sents, cap=cap) for v, sents in verses.items()}
    if task is Task.PNS:
        return {v: ud_pns(sents) for v, sents in verses.items()}
    raise ValueError(f"no dependency reconstruction for task {task.value}")
