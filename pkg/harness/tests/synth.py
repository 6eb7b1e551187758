"""Synthetic dataset builders for the harness tests."""

import json
import random
from pathlib import Path

CONTENT_WORDS = ["the", "a", "man", "men", "jesus", "mary", "peter", "went",
                 "saw", "wept", "prayed", "said", "home", "field", "light",
                 "water", "bread", "fish", "boat", "city", "temple", "crowd",
                 "voice", "hand", "eyes", "heart", "sky", "road", "stone"]
MARKER_WORDS = ["match", "differ"]
SENSES = [f"s{i}.01" for i in range(10)]


def verse(i: int, book: str = "MAT") -> str:
    return f"{book} {1 + i // 25}:{i % 25 + 1}"


def make_pair_records(n: int, seed: int, start: int = 0) -> list[dict]:
    """Separable paired-sequence task: the second verse carries one of two
    marker words, and the label says which."""
    rng = random.Random(seed)
    records = []
    for i in range(n):
        label = i % 2
        text_1 = rng.choices(CONTENT_WORDS, k=rng.randint(3, 6))
        text_2 = rng.choices(CONTENT_WORDS, k=rng.randint(3, 6))
        text_2.insert(rng.randrange(len(text_2) + 1), MARKER_WORDS[1 - label])
        records.append({"task": "ss",
                        "verse_1": verse(start + i), "text_1": " ".join(text_1),
                        "verse_2": verse(start + i, "JHN"),
                        "text_2": " ".join(text_2),
                        "sense": SENSES[rng.randrange(len(SENSES))],
                        "label": label})
    return records


def make_degenerate_records(n: int, start: int = 0) -> list[dict]:
    return [{"task": "sm", "verse_1": verse(start + i), "text_1": "jesus wept",
             "verse_2": None, "text_2": None, "sense": None, "label": 1}
            for i in range(n)]


def write_jsonl(path: Path, records: list[dict]) -> None:
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", "utf-8")
