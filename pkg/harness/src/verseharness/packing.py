"""Sequence packing: verse pairs plus a sense marker token.

Pair instances become [CLS] text_1 [SEP] text_2 [SEP] followed by one
dedicated token per sense label; the tokenizer's vocabulary is extended by
exactly one entry per sense in the inventory, so the new vocabulary size is
the base size plus the inventory size.
"""

from __future__ import annotations

from typing import Sequence


def sense_token(sense: str) -> str:
    return f"[SENSE={sense}]"


class SensePacker:
    def __init__(self, tokenizer, sense_inventory: Sequence[str],
                 max_length: int = 128) -> None:
        self.tokenizer = tokenizer
        self.sense_inventory = list(sense_inventory)
        self.max_length = max_length
        self._sense_ids: dict[str, int] = {}

    def extend_vocabulary(self) -> int:
        """Add one vocabulary entry per sense; returns the number added."""
        tokens = [sense_token(s) for s in self.sense_inventory]
        added = self.tokenizer.add_tokens(tokens)
        self._sense_ids = {
            s: self.tokenizer.convert_tokens_to_ids(sense_token(s))
            for s in self.sense_inventory
        }
        return added

    def pack_pair(self, text_1: str, text_2: str, sense: str) -> dict[str, list[int]]:
        """Descriptor for one pair instance; the sense token comes last."""
        if sense not in self._sense_ids:
            raise KeyError(f"sense {sense!r} not in the packer's inventory")
        encoded = self.tokenizer(text_1, text_2, truncation=True,
                                 max_length=self.max_length - 1)
        descriptor = {key: list(values) for key, values in encoded.items()}
        descriptor["input_ids"].append(self._sense_ids[sense])
        if "attention_mask" in descriptor:
            descriptor["attention_mask"].append(1)
        if "token_type_ids" in descriptor:
            descriptor["token_type_ids"].append(descriptor["token_type_ids"][-1])
        return descriptor

    def pack_single(self, text_1: str) -> dict[str, list[int]]:
        """Descriptor for one single-verse instance: no second segment, no
        sense token."""
        encoded = self.tokenizer(text_1, truncation=True, max_length=self.max_length)
        return {key: list(values) for key, values in encoded.items()}

    def pack(self, record: dict) -> dict[str, list[int]]:
        if record.get("text_2") is not None:
            return self.pack_pair(record["text_1"], record["text_2"], record["sense"])
        return self.pack_single(record["text_1"])
