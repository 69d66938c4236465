import json
from pathlib import Path

import pytest

from astvec.ast_core import load_corpus

REPO = Path(__file__).resolve().parent.parent
GOLDEN_DIR = REPO / "tests" / "fixtures" / "golden"
INVALID_DIR = REPO / "tests" / "fixtures" / "invalid"
CORPUS_PATH = REPO / "data" / "corpus.jsonl"

# the two-line function-returning-double snippet; its golden pair is fixture g01
SNIPPET_SRC = GOLDEN_DIR / "g01_double_times_two.c"


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(CORPUS_PATH.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def golden_pairs():
    pairs = []
    for src in sorted(GOLDEN_DIR.glob("*.c")):
        golden = src.with_suffix(".ast.json")
        assert golden.exists(), f"missing golden for {src.name}"
        pairs.append((src, golden))
    return pairs


def golden_sources():
    return sorted(GOLDEN_DIR.glob("*.c"))


def invalid_sources():
    return sorted(INVALID_DIR.glob("*.c"))


def count_leaves_obj(obj: dict) -> int:
    """Independent leaf counter over the raw interchange JSON."""
    children = obj["children"]
    if not children:
        return 1
    return sum(count_leaves_obj(c) for c in children)


def load_golden_obj(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))
