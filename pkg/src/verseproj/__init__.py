"""Annotation projection over verse-aligned Bible translations.

Parses a richly annotated source corpus, aligns its sentences with a target
translation through shared verse identity, and emits five sequence
classification datasets (mention counting, proper-noun subjects, sentence
mood, same sense, same argument count), plus dependency-parse cross-checks.
"""

__version__ = "0.1.0"
