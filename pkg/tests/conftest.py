import importlib.resources as resources
import io
from pathlib import Path

import pytest

from duanzai.corpus import generate_synthetic, load_pairs, load_templates
from duanzai.crf import TrainConfig, train
from duanzai.fuzzy import DEFAULT_COSTS
from duanzai.pinyin import default_inventory, default_lexicon, load_lexicon
from duanzai.retrieval import train_bigram_lm

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def inventory():
    return default_inventory()


@pytest.fixture(scope="session")
def lexicon(inventory):
    return default_lexicon(inventory)


@pytest.fixture(scope="session")
def costs():
    return DEFAULT_COSTS


@pytest.fixture(scope="session")
def small_lexicon(inventory):
    """Minimal inline lexicon for definitional tests."""
    text = "\n".join([
        "蓝\tlan2",
        "难\tnan2",
        "哭\tku1",
        "瘦\tshou4",
        "长\tchang2,zhang3",
    ])
    return load_lexicon(io.StringIO(text), inventory)


@pytest.fixture(scope="session")
def fixture_templates():
    ref = resources.files("duanzai.data").joinpath("templates.txt")
    with ref.open("r", encoding="utf-8") as fh:
        return load_templates(fh)


@pytest.fixture(scope="session")
def fixture_pairs():
    ref = resources.files("duanzai.data").joinpath("pun_pairs.tsv")
    with ref.open("r", encoding="utf-8") as fh:
        return load_pairs(fh)


@pytest.fixture(scope="session")
def train_corpus(fixture_templates, fixture_pairs):
    return generate_synthetic(fixture_templates[:8], fixture_pairs[:12], seed=42)


@pytest.fixture(scope="session")
def heldout_corpus(fixture_templates, fixture_pairs):
    return generate_synthetic(fixture_templates[8:], fixture_pairs[:12], seed=42)


@pytest.fixture(scope="session")
def trained_model(train_corpus, lexicon):
    return train(train_corpus, lexicon, TrainConfig())


@pytest.fixture(scope="session")
def distractors():
    with open(DATA_DIR / "distractors.txt", encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


@pytest.fixture(scope="session")
def fixture_lm(fixture_pairs, distractors):
    originals = [original for _pun, original in fixture_pairs]
    return train_bigram_lm(originals + distractors, smoothing_k=0.1)
