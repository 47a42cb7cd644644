import pytest

from aekit.corpus import ClaimRecord, ingest
from aekit.tokenizer import train_tokenizer

SMALL_TEXTS = [
    "A device comprising: a housing; a sensor coupled to the housing.",
    "The device of claim 1, wherein the sensor comprises a thermistor.",
    "A system comprising a processor and a memory storing instructions.",
    "The system of claim 1, wherein the processor is configured to "
    "monitor a temperature of the housing.",
    "An apparatus comprising a display panel mounted on an enclosure.",
]


@pytest.fixture(scope="session")
def small_vocab():
    return train_tokenizer(SMALL_TEXTS, vocab_size=400, scheme="bpe")


@pytest.fixture(scope="session")
def ws_vocab():
    return train_tokenizer(SMALL_TEXTS, scheme="whitespace")


def make_corpus():
    records = [
        ClaimRecord("P1", 1, None, SMALL_TEXTS[0], cpc="G06N", year=2019),
        ClaimRecord("P1", 2, 1, SMALL_TEXTS[1], cpc="G06N", year=2019),
        ClaimRecord("P2", 1, None, SMALL_TEXTS[2], year=2020),
        ClaimRecord("P2", 2, 1, SMALL_TEXTS[3], year=2020),
        ClaimRecord("P3", 1, None, SMALL_TEXTS[4], year=2021),
    ]
    return ingest(records)


@pytest.fixture()
def small_corpus():
    return make_corpus()
