"""Generate the five task datasets from aligned, usable verses.

Labels come from the source annotations only; target-language text is carried
into the instances verbatim.  All sampling and splitting is driven by named
substreams of one seed, so a (corpus, target, seed) triple fixes the exported
bytes.
"""

from __future__ import annotations

import hashlib
import json
import random
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .onf import OnfSentence
from .scripture import VerseLabel

GENERATOR_VERSION = "0.1.0"


class Task(str, Enum):
    NMC = "nmc"  # non-pronominal mention counting
    PNS = "pns"  # proper noun in subject
    SM = "sm"    # sentence mood
    SS = "ss"    # same sense
    SAC = "sac"  # same argument count


SINGLE_VERSE_TASKS = (Task.NMC, Task.PNS, Task.SM)
PAIR_TASKS = (Task.SS, Task.SAC)

SM_DECLARATIVE, SM_INTERROGATIVE, SM_IMPERATIVE = 0, 1, 2

# Single-token mentions with these POS tags count as pronominal; DT covers
# bare demonstratives used referentially.
PRONOUN_TAGS = frozenset({"PRP", "PRP$", "WP", "WP$", "DT"})

_SM_BY_LABEL = {
    "S": SM_DECLARATIVE,
    "S-CLF": SM_DECLARATIVE,
    "S-IMP": SM_IMPERATIVE,
    "SQ": SM_INTERROGATIVE,
    "SBARQ": SM_INTERROGATIVE,
    "SQ-CLF": SM_INTERROGATIVE,
}

_CLAUSE_SEGMENTS = {"S", "SQ", "SBARQ", "SINV"}

_NUMBERED_ARG = re.compile(r"^ARG\d$")


def substream(seed: int, name: str) -> random.Random:
    """A named, reproducible random stream derived from one master seed."""
    return random.Random(f"{seed}:{name}")


def nmc_label(sentences: list[OnfSentence],
              pronoun_tags: frozenset[str] = PRONOUN_TAGS) -> int:
    """Count non-pronominal coreference mentions across a verse's sentences."""
    count = 0
    for sentence in sentences:
        for mention in sentence.mentions:
            if mention.start_token == mention.end_token:
                pos = sentence.tokens[mention.start_token][1]
                if pos in pronoun_tags:
                    continue
            count += 1
    return count


def _strip_coindex(label_segments: list[str]) -> str:
    return "-".join(seg for seg in label_segments if not seg.isdigit())


def pns_label(first_sentence: OnfSentence) -> int | None:
    """Whether the main-clause subject contains a proper noun.

    Searches the root's direct children (and, under clause coordination, the
    coordinated clauses' children) for NP-SBJ constituents.  With exactly one
    hit, the label is 1 iff any leaf inside is tagged NNP/NNPS; with zero or
    several hits the instance is skipped.
    """
    root = first_sentence.tree
    candidates = list(root.children)
    clause_children = [child for child in root.children
                       if not child.is_leaf and child.label_segments()[0] in _CLAUSE_SEGMENTS]
    if len(clause_children) >= 2:
        for clause in clause_children:
            candidates.extend(clause.children)
    subjects = [node for node in candidates if node.matches("NP", "SBJ")]
    if len(subjects) != 1:
        return None
    for leaf in subjects[0].leaves():
        if leaf.pos_tag in ("NNP", "NNPS"):
            return 1
    return 0


def sm_label(first_sentence: OnfSentence) -> int | None:
    """Sentence mood from the top constituent label; None means discard."""
    root = first_sentence.tree
    label = _strip_coindex(root.label_segments()) if not root.is_leaf else root.label
    return _SM_BY_LABEL.get(label)


def sense_usages(sentences: list[OnfSentence],
                 numbered_args_only: bool = False) -> list[tuple[str, int]]:
    """(sense, argument count) per predicate usage, in token order.

    The "v" arg never counts; modifier args (ARGM-*) count unless
    numbered_args_only restricts to ARG0..ARG5.
    """
    usages = []
    for sentence in sentences:
        for prop in sorted(sentence.props, key=lambda p: p.head_token):
            args = [arg for arg in prop.args if arg.role != "v"]
            if numbered_args_only:
                args = [arg for arg in args if _NUMBERED_ARG.match(arg.role)]
            usages.append((prop.sense_label, len(args)))
    return usages


@dataclass(frozen=True)
class TaskInstance:
    task: Task
    verse_1: VerseLabel
    text_1: str
    verse_2: VerseLabel | None = None
    text_2: str | None = None
    sense: str | None = None
    label: int = 0

    def __post_init__(self) -> None:
        if self.task in PAIR_TASKS:
            if self.verse_2 is None or self.text_2 is None or self.sense is None:
                raise ValueError(f"{self.task.value} instances need verse_2/text_2/sense")
        if self.task is Task.NMC:
            valid = self.label >= 0
        elif self.task is Task.SM:
            valid = self.label in (0, 1, 2)
        else:
            valid = self.label in (0, 1)
        if not valid:
            raise ValueError(f"label {self.label} out of range for {self.task.value}")

    def identity(self) -> str:
        parts = [self.task.value, str(self.verse_1), str(self.verse_2 or ""),
                 self.sense or "", str(self.label)]
        return "|".join(parts)

    def to_json_dict(self) -> dict:
        return {
            "task": self.task.value,
            "verse_1": str(self.verse_1),
            "text_1": self.text_1,
            "verse_2": None if self.verse_2 is None else str(self.verse_2),
            "text_2": self.text_2,
            "sense": self.sense,
            "label": self.label,
        }

    @classmethod
    def from_json_dict(cls, record: dict) -> "TaskInstance":
        return cls(
            task=Task(record["task"]),
            verse_1=VerseLabel.parse(record["verse_1"]),
            text_1=record["text_1"],
            verse_2=(None if record.get("verse_2") is None
                     else VerseLabel.parse(record["verse_2"])),
            text_2=record.get("text_2"),
            sense=record.get("sense"),
            label=record["label"],
        )


VerseUsages = dict[VerseLabel, list[tuple[str, int]]]


def _distinct_senses(usages: list[tuple[str, int]]) -> list[str]:
    seen: dict[str, None] = {}
    for sense, _ in usages:
        seen.setdefault(sense)
    return list(seen)


def _balance_truncate(instances: list[TaskInstance]) -> list[TaskInstance]:
    """Drop trailing instances of the majority class until |pos - neg| <= 1."""
    n_pos = sum(1 for inst in instances if inst.label == 1)
    n_neg = len(instances) - n_pos
    while abs(n_pos - n_neg) > 1:
        heavy = 1 if n_pos > n_neg else 0
        for i in range(len(instances) - 1, -1, -1):
            if instances[i].label == heavy:
                del instances[i]
                break
        if heavy == 1:
            n_pos -= 1
        else:
            n_neg -= 1
    return instances


def gen_ss(corpus: VerseUsages, target_texts: dict[VerseLabel, str],
           seed: int) -> list[TaskInstance]:
    """Same-sense pairs: does the partner verse also use the given sense?

    For each verse and each of its senses, one positive partner is drawn
    uniformly from the other verses using the sense and one negative partner
    from the verses lacking it; the pair is dropped when either pool is empty.
    """
    rng = substream(seed, "ss")
    verses = sorted(corpus, key=VerseLabel.sort_key)
    senses_of = {v: set(s for s, _ in corpus[v]) for v in verses}
    with_sense: dict[str, list[VerseLabel]] = {}
    for v in verses:
        for sense in _distinct_senses(corpus[v]):
            with_sense.setdefault(sense, []).append(v)

    neg_pools: dict[str, list[VerseLabel]] = {}
    instances: list[TaskInstance] = []
    for v1 in verses:
        for sense in _distinct_senses(corpus[v1]):
            pos_pool = [v for v in with_sense[sense] if v != v1]
            neg_pool = neg_pools.get(sense)
            if neg_pool is None:
                neg_pool = [v for v in verses if sense not in senses_of[v]]
                neg_pools[sense] = neg_pool
            if not pos_pool or not neg_pool:
                continue
            v_pos = rng.choice(pos_pool)
            v_neg = rng.choice(neg_pool)
            instances.append(TaskInstance(Task.SS, v1, target_texts[v1],
                                          v_pos, target_texts[v_pos], sense, 1))
            instances.append(TaskInstance(Task.SS, v1, target_texts[v1],
                                          v_neg, target_texts[v_neg], sense, 0))
    return _balance_truncate(instances)


def _first_usage_counts(corpus: VerseUsages) -> dict[VerseLabel, dict[str, int]]:
    first: dict[VerseLabel, dict[str, int]] = {}
    for verse, usages in corpus.items():
        counts: dict[str, int] = {}
        for sense, n_args in usages:
            counts.setdefault(sense, n_args)
        first[verse] = counts
    return first


def gen_sac(corpus: VerseUsages, target_texts: dict[VerseLabel, str],
            seed: int) -> list[TaskInstance]:
    """Same-argument-count pairs over verses sharing a sense.

    A verse's usage of the sense is fixed deterministically as the first
    usage in token order; the label compares the two verses' counts.
    """
    rng = substream(seed, "sac")
    verses = sorted(corpus, key=VerseLabel.sort_key)
    first_counts = _first_usage_counts(corpus)
    with_sense: dict[str, list[VerseLabel]] = {}
    for v in verses:
        for sense in _distinct_senses(corpus[v]):
            with_sense.setdefault(sense, []).append(v)

    instances: list[TaskInstance] = []
    for v1 in verses:
        for sense in _distinct_senses(corpus[v1]):
            count_1 = first_counts[v1][sense]
            sharing = [v for v in with_sense[sense] if v != v1]
            pos_pool = [v for v in sharing if first_counts[v][sense] == count_1]
            neg_pool = [v for v in sharing if first_counts[v][sense] != count_1]
            if not pos_pool or not neg_pool:
                continue
            v_pos = rng.choice(pos_pool)
            v_neg = rng.choice(neg_pool)
            instances.append(TaskInstance(Task.SAC, v1, target_texts[v1],
                                          v_pos, target_texts[v_pos], sense, 1))
            instances.append(TaskInstance(Task.SAC, v1, target_texts[v1],
                                          v_neg, target_texts[v_neg], sense, 0))
    return _balance_truncate(instances)


SPLIT_NAMES = ("train", "dev", "test")
DEFAULT_RATIOS = (0.8, 0.1, 0.1)


@dataclass
class DatasetBundle:
    task: Task
    splits: dict[str, list[TaskInstance]] = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def all_instances(self) -> list[TaskInstance]:
        return [inst for name in SPLIT_NAMES for inst in self.splits[name]]


def split_dataset(instances: list[TaskInstance],
                  ratios: tuple[float, float, float] = DEFAULT_RATIOS,
                  seed: int = 0, translation_id: str = "") -> DatasetBundle:
    """Deterministically shuffle and cut instances into train/dev/test.

    The shuffle key is a digest of (seed, instance identity), so the split is
    independent of input order.  Pair tasks are split by instance.
    """
    if not instances:
        raise ValueError("cannot split an empty instance list")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1: {ratios}")

    def shuffle_key(inst: TaskInstance) -> tuple[str, str]:
        digest = hashlib.sha256(f"{seed}|{inst.identity()}".encode("utf-8")).hexdigest()
        return digest, inst.identity()

    ordered = sorted(instances, key=shuffle_key)
    n = len(ordered)
    cut_1 = round(n * ratios[0])
    cut_2 = round(n * (ratios[0] + ratios[1]))
    splits = {
        "train": ordered[:cut_1],
        "dev": ordered[cut_1:cut_2],
        "test": ordered[cut_2:],
    }
    provenance = {"translation_id": translation_id, "seed": seed,
                  "generator_version": GENERATOR_VERSION}
    return DatasetBundle(instances[0].task, splits, provenance)


def cap_label(label: int, cap: int) -> int:
    return min(label, cap)


def write_instances(path: str | Path, instances: list[TaskInstance]) -> None:
    lines = [json.dumps(inst.to_json_dict(), ensure_ascii=False) for inst in instances]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")


def read_instances(path: str | Path) -> list[TaskInstance]:
    instances = []
    for line in Path(path).read_text("utf-8").splitlines():
        if line.strip():
            instances.append(TaskInstance.from_json_dict(json.loads(line)))
    return instances


def export_bundle(bundle: DatasetBundle, out_dir: str | Path,
                  cap: int | None = None) -> list[Path]:
    """Write one JSON-lines file per split; NMC additionally gets a capped
    variant alongside the raw file when a cap is set."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for split_name in SPLIT_NAMES:
        instances = bundle.splits[split_name]
        path = out_dir / f"{bundle.task.value}.{split_name}.jsonl"
        write_instances(path, instances)
        written.append(path)
        if cap is not None and bundle.task is Task.NMC:
            capped = [TaskInstance(inst.task, inst.verse_1, inst.text_1,
                                   inst.verse_2, inst.text_2, inst.sense,
                                   cap_label(inst.label, cap))
                      for inst in instances]
            cap_path = out_dir / f"{bundle.task.value}.{split_name}.cap{cap}.jsonl"
            write_instances(cap_path, capped)
            written.append(cap_path)
    return written
