"""Evaluation configuration mirroring the fine-tuning protocol."""

from __future__ import annotations

from dataclasses import dataclass

TASKS = ("nmc", "pns", "sm", "ss", "sac")
PAIR_TASKS = ("ss", "sac")

# Fixed label spaces; nmc is capped before training.
def num_labels(task: str, nmc_cap: int = 3) -> int:
    if task == "nmc":
        return nmc_cap + 1
    if task == "sm":
        return 3
    return 2


@dataclass
class EvalConfig:
    model_id: str
    task: str
    learning_rate: float = 2e-5
    batch_size: int = 16
    epochs: int | None = None  # 10, or 20 for sentence mood
    weight_decay: float = 0.01
    nmc_cap: int = 3
    seed: int = 0
    max_length: int = 128

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ValueError(f"unknown task: {self.task!r}")
        if self.epochs is None:
            self.epochs = 20 if self.task == "sm" else 10
        if min(self.learning_rate, self.batch_size, self.epochs,
               self.weight_decay, self.nmc_cap, self.max_length) <= 0:
            raise ValueError("hyperparameters must be positive")

    @property
    def is_pair_task(self) -> bool:
        return self.task in PAIR_TASKS

    @property
    def num_labels(self) -> int:
        return num_labels(self.task, self.nmc_cap)

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "task": self.task,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "weight_decay": self.weight_decay,
            "nmc_cap": self.nmc_cap,
            "seed": self.seed,
            "max_length": self.max_length,
        }
