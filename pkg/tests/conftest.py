from pathlib import Path

import pytest

from verseproj import align, onf, scripture

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def figure1_doc() -> onf.OnfDocument:
    return onf.load_onf_file(FIXTURES / "figure1.onf", doc_id="jhn/11")


@pytest.fixture(scope="session")
def corpus_docs() -> list[onf.OnfDocument]:
    return onf.load_corpus(FIXTURES / "corpus")


@pytest.fixture(scope="session")
def sidecar() -> dict:
    return align.read_sidecar((FIXTURES / "sidecar.tsv").read_text("utf-8"))


@pytest.fixture(scope="session")
def target_full() -> scripture.Bible:
    return scripture.parse_bible_tsv(
        (FIXTURES / "target_full.tsv").read_text("utf-8"), "engfull")


@pytest.fixture(scope="session")
def target_sparse() -> scripture.Bible:
    return scripture.parse_bible_tsv(
        (FIXTURES / "target_sparse.tsv").read_text("utf-8"), "engsparse")
