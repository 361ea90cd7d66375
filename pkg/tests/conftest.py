import functools

import pytest

from affscheme.dsl import CORPUS, build_ring


@functools.lru_cache(maxsize=None)
def corpus_ring(text):
    return build_ring(text)


def corpus_rings():
    return [corpus_ring(t) for t in CORPUS]


@pytest.fixture(scope="session")
def rings():
    return corpus_rings()


# (space, preset) pairs used by the sheafification checks
SHEAF_INSTANCES = [
    ("discrete1", "const-Z2"),
    ("discrete2", "const-Z2"),
    ("discrete2", "const-Z3"),
    ("discrete2", "tower-Z2"),
    ("discrete2", "functions-Z2"),
    ("discrete3", "const-Z2"),
    ("discrete3", "const-chain-Z4-Z2"),
    ("discrete3", "functions-Z2"),
    ("sierpinski", "const-Z2"),
    ("sierpinski", "const-chain-Z4-Z2"),
    ("sierpinski", "tower-Z2"),
    ("sierpinski", "const-Z2-raw"),
    ("chain3", "const-Z2"),
    ("chain3", "const-chain-Z4-Z2"),
    ("chain3", "tower-Z2"),
    ("chain3", "functions-Z2"),
]
