"""Fine-tune an off-the-shelf sequence-classification model on one task.

Plain AdamW loop with the protocol's hyperparameters (learning rate 2e-5,
batch size 16, 10 epochs or 20 for sentence mood, weight decay 0.01);
accuracy on the test split is the reported metric.
"""

from __future__ import annotations

import random
from pathlib import Path

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from .config import EvalConfig
from .data import cap_labels, read_instances, sense_inventory
from .packing import SensePacker


def _pad_batch(descriptors: list[dict[str, list[int]]], pad_id: int) -> dict:
    width = max(len(d["input_ids"]) for d in descriptors)
    batch: dict[str, list[list[int]]] = {}
    for descriptor in descriptors:
        n_pad = width - len(descriptor["input_ids"])
        for key, values in descriptor.items():
            fill = pad_id if key == "input_ids" else 0
            batch.setdefault(key, []).append(list(values) + [fill] * n_pad)
    return {key: torch.tensor(values) for key, values in batch.items()}


def _accuracy(model, packed: list[dict], labels: list[int], pad_id: int,
              batch_size: int, device) -> float:
    model.eval()
    correct = 0
    with torch.no_grad():
        for start in range(0, len(packed), batch_size):
            batch = _pad_batch(packed[start:start + batch_size], pad_id)
            batch = {k: v.to(device) for k, v in batch.items()}
            logits = model(**batch).logits
            predictions = logits.argmax(dim=-1).tolist()
            correct += sum(int(p == l) for p, l in
                           zip(predictions, labels[start:start + batch_size]))
    return correct / len(labels)


def train_eval(config: EvalConfig, train_path: str | Path,
               test_path: str | Path) -> dict:
    """Fine-tune on the train split, report accuracy on the test split."""
    torch.manual_seed(config.seed)
    rng = random.Random(config.seed)
    device = torch.device("cuda" if torch.cuda.is_available() else "cpu")

    train = read_instances(train_path)
    test = read_instances(test_path)
    if config.task == "nmc":
        train = cap_labels(train, config.nmc_cap)
        test = cap_labels(test, config.nmc_cap)

    tokenizer = AutoTokenizer.from_pretrained(config.model_id)
    packer = SensePacker(tokenizer, sense_inventory(train, test),
                         max_length=config.max_length)
    packer.extend_vocabulary()

    model = AutoModelForSequenceClassification.from_pretrained(
        config.model_id, num_labels=config.num_labels)
    model.resize_token_embeddings(len(tokenizer))
    model.to(device)

    packed_train = [packer.pack(rec) for rec in train]
    labels_train = [rec["label"] for rec in train]
    packed_test = [packer.pack(rec) for rec in test]
    labels_test = [rec["label"] for rec in test]
    pad_id = tokenizer.pad_token_id or 0

    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate,
                                  weight_decay=config.weight_decay)
    loss_fn = torch.nn.CrossEntropyLoss()
    order = list(range(len(packed_train)))
    for _ in range(config.epochs):
        model.train()
        rng.shuffle(order)
        for start in range(0, len(order), config.batch_size):
            indices = order[start:start + config.batch_size]
            batch = _pad_batch([packed_train[i] for i in indices], pad_id)
            batch = {k: v.to(device) for k, v in batch.items()}
            targets = torch.tensor([labels_train[i] for i in indices], device=device)
            optimizer.zero_grad()
            loss = loss_fn(model(**batch).logits, targets)
            loss.backward()
            optimizer.step()

    accuracy = _accuracy(model, packed_test, labels_test, pad_id,
                         config.batch_size, device)
    return {
        "model_id": config.model_id,
        "task": config.task,
        "accuracy": accuracy,
        "config": config.to_dict(),
    }
