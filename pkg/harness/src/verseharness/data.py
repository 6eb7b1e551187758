"""Reader for the task JSONL files.

Each line is an object {"task", "verse_1", "text_1", "verse_2", "text_2",
"sense", "label"}; pair tasks fill verse_2/text_2/sense, single-verse tasks
leave them null.
"""

from __future__ import annotations

import json
from pathlib import Path

REQUIRED_FIELDS = ("task", "verse_1", "text_1", "label")


def read_instances(path: str | Path) -> list[dict]:
    instances = []
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        record = json.loads(line)
        missing = [f for f in REQUIRED_FIELDS if record.get(f) is None]
        if missing:
            raise ValueError(f"{path}:{lineno}: missing fields {missing}")
        instances.append(record)
    return instances


def cap_labels(instances: list[dict], cap: int) -> list[dict]:
    return [{**rec, "label": min(rec["label"], cap)} for rec in instances]


def sense_inventory(*instance_lists: list[dict]) -> list[str]:
    """Sorted distinct sense labels across splits."""
    senses = {rec["sense"] for instances in instance_lists
              for rec in instances if rec.get("sense") is not None}
    return sorted(senses)
