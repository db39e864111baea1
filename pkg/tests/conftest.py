import pytest

from arithfractal import load_corpus_system


@pytest.fixture(scope="session")
def z_binary():
    return load_corpus_system("z-binary")


@pytest.fixture(scope="session")
def digits01():
    return load_corpus_system("digits01")


@pytest.fixture(scope="session")
def digits012():
    return load_corpus_system("digits012")


@pytest.fixture(scope="session")
def z_2x3x():
    return load_corpus_system("z-2x3x")


@pytest.fixture(scope="session")
def gauss_base():
    return load_corpus_system("gauss-base")


@pytest.fixture(scope="session")
def p1_doubling():
    return load_corpus_system("p1-doubling")


@pytest.fixture(scope="session")
def p1_full():
    return load_corpus_system("p1-powers2-full")


@pytest.fixture(scope="session")
def q2_powers2():
    return load_corpus_system("q2-powers2")
