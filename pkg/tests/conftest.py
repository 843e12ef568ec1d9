import pytest

from lamit import corpus as corpus_mod
from lamit import features
from lamit import lexicon as lexicon_mod


@pytest.fixture(scope='session')
def italian():
    return features.load_italian()


@pytest.fixture(scope='session')
def english():
    return features.load_english()


@pytest.fixture(scope='session')
def lamit_lexicon(italian):
    return lexicon_mod.load_lamit_lexicon(italian)


@pytest.fixture(scope='session')
def lamit_corpus(italian):
    return corpus_mod.load_lamit_corpus(italian)
