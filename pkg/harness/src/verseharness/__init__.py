"""Fine-tuning harness for the exported verse-task JSONL datasets."""

__version__ = "0.1.0"
