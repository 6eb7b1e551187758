"""OntoNotes Normal Form parsing: trees, coreference mentions, predicate structure.

An ONF file holds one block per sentence.  Each block has sections introduced
by the literal column-0 headers "Plain sentence:", "Treebanked sentence:",
"Tree:" and "Leaves:".  The Leaves section lists tokens as "N  surface" lines
followed by indented annotation lines of the form "kind: payload"; coref
payloads are "TYPE CHAIN START-END" and prop payloads are a sense label
("lemma.NN") followed by one argument line per role ("ROLE ... HEAD:LEVELS,
surface...").  Unknown annotation kinds (name, sense, ...) and unknown
sections (speaker information, ...) are skipped.

Token indices count non-empty tree leaves only; empty categories (traces,
tagged -NONE-) carry no index.
"""

from __future__ import annotations

import re
import concurrent.futures
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator


class OnfParseError(ValueError):
    """An ONF file or tree expression is malformed."""


_SECTION_PLAIN = "Plain sentence:"
_SECTION_TREEBANKED = "Treebanked sentence:"
_SECTION_TREE = "Tree:"
_SECTION_LEAVES = "Leaves:"
_KNOWN_SECTIONS = (_SECTION_PLAIN, _SECTION_TREEBANKED, _SECTION_TREE, _SECTION_LEAVES)

EMPTY_CATEGORY_TAG = "-NONE-"

_RULE_LINE = re.compile(r"^-{3,}\s*$")
_SECTION_HEADER = re.compile(r"^[A-Za-z][A-Za-z ]*:\s*$")
_LEAF_TOKEN = re.compile(r"^\s*(\d+)\s{2,}(\S.*?)\s*$")
_LEAF_ANNOTATION = re.compile(r"^\s+([a-z]+):\s*(.*?)\s*$")
_COREF_PAYLOAD = re.compile(r"^(\S+)\s+(\d+)\s+(\d+)-(\d+)(?:\s|$)")
_SENSE_LABEL = re.compile(r"^\S+\.\d+$")
_ARG_POINTER = re.compile(r"^(\d+):(\d+),?$")


@dataclass
class SyntaxTree:
    """A PTB-style constituent: either an internal node or a leaf.

    Labels are kept verbatim, function tags included; leaves carry the
    surface form, and non-empty leaves a left-to-right token index.
    """

    label: str
    children: list["SyntaxTree"] = field(default_factory=list)
    surface: str | None = None
    token_index: int | None = None
    is_empty_category: bool = False

    @property
    def is_leaf(self) -> bool:
        return self.surface is not None

    @property
    def pos_tag(self) -> str | None:
        """POS tag of a leaf (its preterminal label); None for internal nodes."""
        return self.label if self.is_leaf else None

    def leaves(self) -> Iterator["SyntaxTree"]:
        if self.is_leaf:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()

    def non_empty_leaves(self) -> Iterator["SyntaxTree"]:
        return (leaf for leaf in self.leaves() if not leaf.is_empty_category)

    def token_span(self) -> tuple[int, int]:
        """Inclusive (start, end) token indices covered by this constituent."""
        indices = [leaf.token_index for leaf in self.non_empty_leaves()]
        if not indices:
            raise IndexError(f"constituent {self.label!r} covers no tokens")
        return min(indices), max(indices)

    def label_segments(self) -> list[str]:
        """Label split into tag segments on "-" and "=" (e.g. NP-SBJ-1)."""
        return re.split(r"[-=]", self.label) if self.label != EMPTY_CATEGORY_TAG else [self.label]

    def matches(self, *segments: str) -> bool:
        """True if the label's leading tag segments equal `segments`."""
        return self.label_segments()[: len(segments)] == list(segments)

    def to_sexpr(self) -> str:
        if self.is_leaf:
            return f"({self.label} {self.surface})"
        inner = " ".join(child.to_sexpr() for child in self.children)
        return f"({self.label} {inner})"


@dataclass(frozen=True)
class CorefMention:
    coref_type: str
    chain_id: int
    start_token: int
    end_token: int  # inclusive

    def __post_init__(self) -> None:
        if self.start_token > self.end_token or self.chain_id < 0:
            raise ValueError(f"bad mention span: {self}")


@dataclass(frozen=True)
class PropArg:
    role: str
    head_token: int
    levels_up: int

    def __post_init__(self) -> None:
        if self.levels_up < 0:
            raise ValueError(f"levels_up must be >= 0: {self}")


@dataclass
class PropInstance:
    head_token: int
    sense_label: str  # lemma.NN
    args: list[PropArg] = field(default_factory=list)


@dataclass
class OnfSentence:
    index: int
    plain_text: str
    tokens: list[tuple[str, str]]  # (surface, pos_tag), empty categories excluded
    tree: SyntaxTree
    mentions: list[CorefMention] = field(default_factory=list)
    props: list[PropInstance] = field(default_factory=list)


@dataclass
class OnfDocument:
    doc_id: str
    sentences: list[OnfSentence] = field(default_factory=list)


def _tokenize_sexpr(text: str) -> list[str]:
    return re.findall(r"\(|\)|[^\s()]+", text)


def parse_tree(sexpr: str) -> SyntaxTree:
    """Parse a parenthesized PTB tree; a single-child TOP wrapper is unwrapped.

    Non-empty leaves are indexed 0..n-1 left to right; leaves under -NONE-
    are empty categories and carry no token index.
    """
    tokens = _tokenize_sexpr(sexpr)
    if not tokens:
        raise OnfParseError("empty tree expression")
    pos = 0

    def parse_node() -> SyntaxTree:
        nonlocal pos
        if tokens[pos] != "(":
            raise OnfParseError(f"expected '(' at token {pos}: {tokens[pos]!r}")
        pos += 1
        if pos >= len(tokens) or tokens[pos] in "()":
            raise OnfParseError("missing constituent label")
        label = tokens[pos]
        pos += 1
        node = SyntaxTree(label)
        while pos < len(tokens) and tokens[pos] != ")":
            if tokens[pos] == "(":
                node.children.append(parse_node())
            else:
                if node.children or node.surface is not None:
                    raise OnfParseError(f"mixed leaf/constituent content under {label!r}")
                node.surface = tokens[pos]
                node.is_empty_category = label == EMPTY_CATEGORY_TAG
                pos += 1
        if pos >= len(tokens):
            raise OnfParseError("unbalanced parentheses: missing ')'")
        pos += 1
        if node.surface is None and not node.children:
            raise OnfParseError(f"constituent {label!r} has no children")
        return node

    root = parse_node()
    if pos != len(tokens):
        raise OnfParseError("trailing content after tree root")
    if root.label == "TOP" and len(root.children) == 1:
        root = root.children[0]
    for i, leaf in enumerate(root.non_empty_leaves()):
        leaf.token_index = i
    return root


def resolve_arg_span(tree: SyntaxTree, head_token: int, levels_up: int) -> tuple[int, int]:
    """Token span of the ancestor `levels_up` node-steps above the head leaf.

    levels_up 0 is the leaf itself.  Raises IndexError if the head token does
    not exist or the walk runs past the root.
    """

    def find(node: SyntaxTree, ancestors: list[SyntaxTree]) -> list[SyntaxTree] | None:
        if node.is_leaf:
            return ancestors + [node] if node.token_index == head_token else None
        for child in node.children:
            path = find(child, ancestors + [node])
            if path is not None:
                return path
        return None

    path = find(tree, [])
    if path is None:
        raise IndexError(f"no leaf with token index {head_token}")
    if levels_up >= len(path):
        raise IndexError(f"levels_up {levels_up} exceeds depth of token {head_token}")
    return path[len(path) - 1 - levels_up].token_span()


class _SentenceBlock:
    """Accumulates one sentence's section lines before assembly."""

    def __init__(self, index: int) -> None:
        self.index = index
        self.plain: list[str] = []
        self.tree: list[str] = []
        self.leaves: list[str] = []
        self.seen_leaves = False


def _parse_coref(payload: str, index: int, n_tokens: int) -> CorefMention:
    match = _COREF_PAYLOAD.match(payload)
    if not match:
        raise OnfParseError(f"sentence {index}: malformed coref payload: {payload!r}")
    start, end = int(match.group(3)), int(match.group(4))
    if start > end:
        raise OnfParseError(f"sentence {index}: inverted mention span {start}-{end}")
    if end >= n_tokens:
        raise OnfParseError(f"sentence {index}: mention token index {end} out of range")
    return CorefMention(match.group(1), int(match.group(2)), start, end)


def _parse_arg_line(line: str, index: int, n_tokens: int) -> PropArg:
    parts = line.split()
    role = parts[0]
    for part in parts[1:]:
        match = _ARG_POINTER.match(part)
        if match:
            head, levels = int(match.group(1)), int(match.group(2))
            if head >= n_tokens:
                raise OnfParseError(f"sentence {index}: arg token index {head} out of range")
            return PropArg(role, head, levels)
    raise OnfParseError(f"sentence {index}: arg line without HEAD:LEVELS pointer: {line!r}")


def _parse_leaves(block: _SentenceBlock, tokens: list[tuple[str, str]],
                  sentence: OnfSentence) -> None:
    n_tokens = len(tokens)
    current_prop: PropInstance | None = None
    skipping_kind = False
    for line in block.leaves:
        token_match = _LEAF_TOKEN.match(line)
        annotation_match = _LEAF_ANNOTATION.match(line)
        if token_match:
            idx, surface = int(token_match.group(1)), token_match.group(2)
            if idx >= n_tokens:
                raise OnfParseError(f"sentence {block.index}: leaf token index {idx} out of range")
            if surface != tokens[idx][0]:
                raise OnfParseError(
                    f"sentence {block.index}: leaf {idx} surface {surface!r} "
                    f"does not match tree token {tokens[idx][0]!r}")
            current_prop = None
            skipping_kind = False
        elif annotation_match:
            kind, payload = annotation_match.groups()
            current_prop = None
            skipping_kind = False
            if kind == "coref":
                sentence.mentions.append(_parse_coref(payload, block.index, n_tokens))
            elif kind == "prop":
                sense = payload.split()[0] if payload.split() else ""
                if not _SENSE_LABEL.match(sense):
                    raise OnfParseError(
                        f"sentence {block.index}: malformed sense label {payload!r}")
                current_prop = PropInstance(head_token=-1, sense_label=sense)
                sentence.props.append(current_prop)
            else:
                skipping_kind = True  # name, sense, ... : recognized, not modeled
        elif line.strip() and current_prop is not None:
            arg = _parse_arg_line(line, block.index, n_tokens)
            if arg.role == "v":
                if any(existing.role == "v" for existing in current_prop.args):
                    raise OnfParseError(
                        f"sentence {block.index}: duplicate 'v' arg for "
                        f"{current_prop.sense_label}")
                current_prop.head_token = arg.head_token
            current_prop.args.append(arg)
        elif line.strip() and not skipping_kind:
            raise OnfParseError(f"sentence {block.index}: unparseable leaves line: {line!r}")
    for prop in sentence.props:
        if prop.head_token < 0:
            raise OnfParseError(
                f"sentence {block.index}: prop {prop.sense_label} has no 'v' arg")


def _assemble(block: _SentenceBlock) -> OnfSentence:
    if not block.tree:
        raise OnfParseError(f"sentence {block.index}: missing Tree section")
    if not block.seen_leaves:
        raise OnfParseError(f"sentence {block.index}: missing Leaves section")
    try:
        tree = parse_tree(" ".join(block.tree))
    except OnfParseError as exc:
        raise OnfParseError(f"sentence {block.index}: {exc}") from None
    tokens = [(leaf.surface, leaf.label) for leaf in tree.non_empty_leaves()]
    if not tokens:
        raise OnfParseError(f"sentence {block.index}: sentence has no tokens")
    plain = " ".join(" ".join(block.plain).split())
    sentence = OnfSentence(index=block.index, plain_text=plain, tokens=tokens, tree=tree)
    _parse_leaves(block, tokens, sentence)
    return sentence


def parse_onf(text: str, doc_id: str = "") -> OnfDocument:
    """Parse ONF file content into a document of annotated sentences."""
    document = OnfDocument(doc_id)
    block: _SentenceBlock | None = None
    section: str | None = None
    for raw in text.splitlines():
        line = raw.rstrip()
        if _RULE_LINE.match(line):
            continue
        at_margin = bool(line) and not line[0].isspace()
        if at_margin and line == _SECTION_PLAIN:
            if block is not None:
                document.sentences.append(_assemble(block))
            block = _SentenceBlock(len(document.sentences))
            section = _SECTION_PLAIN
            continue
        if at_margin and _SECTION_HEADER.match(line):
            if line in (_SECTION_TREEBANKED, _SECTION_TREE, _SECTION_LEAVES):
                if block is None:
                    raise OnfParseError(f"section {line!r} before any sentence block")
                if line == _SECTION_LEAVES:
                    block.seen_leaves = True
                section = line
            else:
                section = None  # unknown section (speaker information, ...)
            continue
        if block is None or section is None:
            continue
        if section == _SECTION_PLAIN:
            if line.strip():
                block.plain.append(line.strip())
        elif section == _SECTION_TREE:
            if line.strip():
                block.tree.append(line.strip())
        elif section == _SECTION_LEAVES:
            block.leaves.append(line)
    if block is not None:
        document.sentences.append(_assemble(block))
    return document


def load_onf_file(path: str | Path, doc_id: str | None = None) -> OnfDocument:
    path = Path(path)
    if doc_id is None:
        doc_id = path.stem
    return parse_onf(path.read_text("utf-8"), doc_id=doc_id)


def load_corpus(source_dir: str | Path, pattern: str = "*.onf",
                max_workers: int = 4) -> list[OnfDocument]:
    """Parse every ONF file under a directory tree.

    Document ids are slash-separated paths relative to source_dir, without
    the file suffix.  Parsing is pure, so files are handled concurrently;
    the result is sorted by doc_id regardless of completion order.
    """
    source_dir = Path(source_dir)
    paths = sorted(source_dir.rglob(pattern))

    def load(path: Path) -> OnfDocument:
        doc_id = path.relative_to(source_dir).with_suffix("").as_posix()
        return load_onf_file(path, doc_id=doc_id)

    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
        docs = list(pool.map(load, paths))
    return sorted(docs, key=lambda doc: doc.doc_id)
